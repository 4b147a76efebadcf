#include "mtm/wellformed.hpp"

#include "mtm/derive.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace mtm {

std::string rule_name(WfRule r) { return "WF" + std::to_string(static_cast<int>(r)); }

namespace {

std::string join_messages(const std::vector<WfViolation> &v)
{
	std::string s = "ill-formed execution:";
	for (const auto &x : v)
		s += " [" + rule_name(x.rule) + "] " + x.message + ";";
	return s;
}

class Checker {
public:
	explicit Checker(const Program &p) : p_(p), n_(p.size()) {}

	std::vector<WfViolation> take()
	{
		std::sort(out_.begin(), out_.end());
		out_.erase(std::unique(out_.begin(), out_.end()), out_.end());
		return std::move(out_);
	}

	void add(WfRule r, std::vector<EventId> ev, std::string msg)
	{
		out_.push_back({r, std::move(ev), std::move(msg)});
	}

	EventKind kind(EventId e) const { return p_.events[e].kind; }
	bool valid(EventId e) const { return e < n_; }

	using Pred = std::function<bool(EventKind)>;

	// WF13 for one relation; returns the well-typed part.
	Relation typed(const Relation &r, std::string_view name, const Pred &from, const Pred &to)
	{
		Relation ok(n_);
		r.for_each([&](EventId a, EventId b) {
			if (!valid(a) || !valid(b)) {
				add(WfRule::WF13, {a, b}, std::string(name) + " pair references a missing event");
				return;
			}
			if (!from(kind(a)) || !to(kind(b))) {
				add(WfRule::WF13, {a, b}, std::string(name) + " pair has the wrong event kinds");
				return;
			}
			ok.insert(a, b);
		});
		return ok;
	}

	void structural(ValidateOptions opts);

	// Strict total order over `members` (WF1, WF3, WF7 share this).
	void total_order(const Relation &r, const std::vector<EventId> &members, WfRule rule,
			 const std::string &what)
	{
		for (auto a : members) {
			if (r.contains(a, a))
				add(rule, {a}, what + " is reflexive");
			for (auto b : members) {
				if (a >= b)
					continue;
				bool ab = r.contains(a, b), ba = r.contains(b, a);
				if (!ab && !ba)
					add(rule, {a, b}, what + " leaves the pair unordered");
				if (ab && ba)
					add(rule, {a, b}, what + " orders the pair both ways");
			}
		}
		for (auto a : members)
			for (auto b : members)
				for (auto c : members)
					if (r.contains(a, b) && r.contains(b, c) && !r.contains(a, c) && a != c)
						add(rule, {a, b, c}, what + " is not transitive");
	}

	Relation po_, ghost_, remap_, rmw_;

protected:
	const Program &p_;
	std::size_t n_;
	std::vector<WfViolation> out_;
};

void Checker::structural(ValidateOptions opts)
{
	const auto &ev = p_.events;
	auto non_ghost = [](EventKind k) { return !is_ghost(k); };
	auto user_mem = [](EventKind k) { return is_data(k); };

	po_ = typed(p_.po, "po", non_ghost, non_ghost);
	ghost_ = typed(p_.ghost, "ghost", user_mem, [](EventKind k) { return is_ghost(k); });
	remap_ = typed(p_.remap, "remap", [](EventKind k) { return k == EventKind::PteWrite; },
		       [](EventKind k) { return k == EventKind::Invlpg; });
	rmw_ = typed(p_.rmw, "rmw", [](EventKind k) { return k == EventKind::UserRead; },
		     [](EventKind k) { return k == EventKind::UserWrite; });

	// WF1
	po_.for_each([&](EventId a, EventId b) {
		if (ev[a].thread != ev[b].thread)
			add(WfRule::WF1, {a, b}, "po relates events on different threads");
	});
	for (auto t : p_.threads()) {
		std::vector<EventId> members;
		for (EventId e = 0; e < n_; ++e)
			if (ev[e].thread == t && !is_ghost(ev[e].kind))
				members.push_back(e);
		total_order(po_, members, WfRule::WF1, "po on thread " + std::to_string(t));
	}

	// WF2
	for (EventId e = 0; e < n_; ++e)
		if (ev[e].kind != EventKind::Fence && ev[e].va.id >= p_.init.size())
			add(WfRule::WF2, {e}, "event addresses an undeclared VA");

	// WF4
	std::vector<std::vector<EventId>> invokers(n_);
	ghost_.for_each([&](EventId inv, EventId g) { invokers[g].push_back(inv); });
	for (EventId g = 0; g < n_; ++g) {
		if (!is_ghost(ev[g].kind))
			continue;
		if (invokers[g].size() != 1) {
			add(WfRule::WF4, {g}, invokers[g].empty() ? "ghost event has no invoker"
								 : "ghost event has several invokers");
			continue;
		}
		auto inv = invokers[g][0];
		if (ev[inv].thread != ev[g].thread)
			add(WfRule::WF4, {inv, g}, "ghost event runs on another thread than its invoker");
		if (ev[inv].va != ev[g].va)
			add(WfRule::WF4, {inv, g}, "ghost event addresses another PTE than its invoker's");
		if (ev[g].kind == EventKind::DirtyBitWrite && ev[inv].kind != EventKind::UserWrite)
			add(WfRule::WF4, {inv, g}, "dirty bit write invoked by a non-write");
	}
	for (EventId e = 0; e < n_; ++e) {
		std::size_t dbs = 0, walks = 0;
		if (e < ghost_.universe())
			ghost_.successors(e).for_each([&](EventId g) {
				(ev[g].kind == EventKind::DirtyBitWrite ? dbs : walks)++;
			});
		if (ev[e].kind == EventKind::UserWrite && dbs != 1)
			add(WfRule::WF4, {e}, "user write must invoke exactly one dirty bit write");
		if (walks > 1)
			add(WfRule::WF4, {e}, "event invokes more than one walk");
	}

	// WF8
	auto threads = p_.threads();
	std::vector<std::size_t> inv_preds(n_, 0);
	remap_.for_each([&](EventId pw, EventId i) {
		++inv_preds[i];
		if (ev[pw].va != ev[i].va)
			add(WfRule::WF8, {pw, i}, "remap Invlpg addresses another VA");
	});
	auto immediately_follows = [&](EventId a, EventId b) {
		if (!po_.contains(a, b))
			return false;
		for (EventId x = 0; x < n_; ++x)
			if (po_.contains(a, x) && po_.contains(x, b))
				return false;
		return true;
	};
	for (EventId pw = 0; pw < n_; ++pw) {
		if (ev[pw].kind != EventKind::PteWrite)
			continue;
		std::map<ThreadId, std::vector<EventId>> per;
		if (pw < remap_.universe())
			remap_.successors(pw).for_each([&](EventId i) { per[ev[i].thread].push_back(i); });
		for (auto t : threads) {
			auto &v = per[t];
			if (v.size() != 1) {
				add(WfRule::WF8, {pw}, "PTE write needs exactly one Invlpg on thread " +
							      std::to_string(t));
				continue;
			}
			if (t == ev[pw].thread && !immediately_follows(pw, v[0]))
				add(WfRule::WF8, {pw, v[0]}, "local Invlpg must immediately follow its PTE write");
		}
	}
	for (EventId i = 0; i < n_; ++i)
		if (inv_preds[i] > 1)
			add(WfRule::WF8, {i}, "Invlpg has several remap predecessors");
	// a PTE write cannot depend, through po, on an Invlpg it raised
	if (auto cyc = find_cycle(po_ | remap_))
		add(WfRule::WF8, std::vector<EventId>(cyc->begin(), cyc->end() - 1), "remap and po form a cycle");

	// WF9
	if (opts.useless_invlpg_filter)
		for (auto i : useless_invlpgs(p_))
			add(WfRule::WF9, {i}, "spurious Invlpg has no later access to its VA");

	// WF10
	std::vector<std::size_t> rmw_deg(n_, 0);
	rmw_.for_each([&](EventId r, EventId w) {
		++rmw_deg[r];
		++rmw_deg[w];
		if (ev[r].va != ev[w].va || ev[r].thread != ev[w].thread || !immediately_follows(r, w))
			add(WfRule::WF10, {r, w}, "rmw pair must be an adjacent same-VA read and write");
	});
	for (EventId e = 0; e < n_; ++e)
		if (rmw_deg[e] > 1)
			add(WfRule::WF10, {e}, "event is in several rmw pairs");

	// WF12
	std::set<Pa> seen;
	for (std::uint32_t v = 0; v < p_.init.size(); ++v)
		if (!seen.insert(p_.init[v]).second)
			add(WfRule::WF12, {}, "initial mapping of VA " + std::to_string(v) + " is shared");
}

class ExecChecker : public Checker {
public:
	explicit ExecChecker(const ExecutionGraph &g) : Checker(g.program), g_(g) {}
	void execution();

private:
	const ExecutionGraph &g_;
};

void ExecChecker::execution()
{
	const auto &ev = p_.events;
	auto rf = typed(g_.rf, "rf", is_write_kind, is_read_kind);
	auto co = typed(g_.co, "co", is_write_kind, is_write_kind);
	auto rf_ptw = typed(g_.rf_ptw, "rf_ptw", [](EventKind k) { return k == EventKind::PtWalk; }, is_data);
	auto mapped = [](EventKind k) { return is_data(k) || k == EventKind::PtWalk; };
	auto rf_pa = typed(g_.rf_pa, "rf_pa", [](EventKind k) { return k == EventKind::PteWrite; }, mapped);
	auto is_pte = [](EventKind k) { return k == EventKind::PteWrite; };
	auto co_pa = typed(g_.co_pa, "co_pa", is_pte, is_pte);
	g_.rf_pa_init.for_each([&](EventId e) {
		if (!valid(e) || !mapped(kind(e)))
			add(WfRule::WF13, {e}, "initial-mapping reader is not a data event or walk");
	});

	// WF6
	std::vector<MappingSource> map(n_);
	std::vector<std::size_t> nsrc(n_, 0);
	rf_pa.for_each([&](EventId pw, EventId e) {
		++nsrc[e];
		map[e] = MappingSource::from(pw);
		if (ev[pw].va != ev[e].va)
			add(WfRule::WF6, {pw, e}, "mapping comes from a PTE write to another VA");
	});
	g_.rf_pa_init.for_each([&](EventId e) {
		if (valid(e) && mapped(kind(e))) {
			++nsrc[e];
			map[e] = MappingSource::init();
		}
	});
	for (EventId e = 0; e < n_; ++e)
		if (mapped(kind(e)) && nsrc[e] != 1)
			add(WfRule::WF6, {e}, nsrc[e] ? "event has several mapping sources"
						      : "event has no mapping source");

	auto d = derive_unchecked(g_);
	const auto &loc = d.effective_loc;

	// WF3
	std::vector<std::optional<EventId>> src(n_);
	rf.for_each([&](EventId w, EventId r) {
		if (src[r])
			add(WfRule::WF3, {r}, "read has several rf sources");
		src[r] = w;
		if (loc[w].none() || !(loc[w] == loc[r]))
			add(WfRule::WF3, {w, r}, "rf pair has different locations");
	});
	co.for_each([&](EventId a, EventId b) {
		if (loc[a].none() || !(loc[a] == loc[b]))
			add(WfRule::WF3, {a, b}, "co pair has different locations");
	});
	std::map<std::pair<int, std::uint32_t>, std::vector<EventId>> writes;
	for (EventId e = 0; e < n_; ++e)
		if (is_write_kind(kind(e)) && !loc[e].none())
			writes[{static_cast<int>(loc[e].space), loc[e].id}].push_back(e);
	for (const auto &[key, members] : writes)
		total_order(co, members, WfRule::WF3, "co");
	for (EventId w = 0; w < n_; ++w) {
		if (kind(w) != EventKind::PtWalk || nsrc[w] != 1)
			continue;
		MappingSource loaded = MappingSource::init();
		if (src[w]) {
			auto s = *src[w];
			if (kind(s) == EventKind::PteWrite) {
				loaded = MappingSource::from(s);
			} else if (kind(s) == EventKind::DirtyBitWrite) {
				auto inv = p_.invoker(s);
				loaded = inv ? map[*inv] : MappingSource{};
			}
		}
		if (!(loaded == map[w]))
			add(WfRule::WF3, {w}, "walk's mapping differs from the PTE value it read");
	}

	// WF6, dirty bit side: setting the bit leaves the mapping in the PTE as
	// its coherence predecessor left it.
	for (EventId x = 0; x < n_; ++x) {
		if (kind(x) != EventKind::DirtyBitWrite || loc[x].none())
			continue;
		auto inv = p_.invoker(x);
		if (!inv)
			continue;
		std::optional<EventId> prev;
		for (auto y : writes[{static_cast<int>(loc[x].space), loc[x].id}])
			if (co.contains(y, x) && (!prev || co.contains(*prev, y)))
				prev = y;
		MappingSource held = MappingSource::init();
		if (prev && kind(*prev) == EventKind::PteWrite)
			held = MappingSource::from(*prev);
		else if (prev)
			held = p_.invoker(*prev) ? map[*p_.invoker(*prev)] : MappingSource{};
		if (!(held == map[*inv]))
			add(WfRule::WF6, {x}, "dirty bit write changes the mapping it overwrites");
	}

	// WF5
	std::vector<std::vector<EventId>> walks_of(n_);
	rf_ptw.for_each([&](EventId w, EventId e) { walks_of[e].push_back(w); });
	for (EventId e = 0; e < n_; ++e) {
		if (!is_data(kind(e)))
			continue;
		if (walks_of[e].size() != 1) {
			add(WfRule::WF5, {e}, walks_of[e].empty() ? "data event has no walk"
								  : "data event has several walks");
			continue;
		}
		auto w = walks_of[e][0];
		auto inv = p_.invoker(w);
		if (!inv) {
			add(WfRule::WF5, {w, e}, "walk has no invoker");
			continue;
		}
		if (ev[*inv].thread != ev[e].thread || ev[w].va != ev[e].va)
			add(WfRule::WF5, {w, e}, "walk belongs to another thread or VA");
		else if (*inv != e && !po_.contains(*inv, e))
			add(WfRule::WF5, {w, e}, "walk's invoker does not precede the event");
		else
			for (EventId i = 0; i < n_; ++i)
				if (kind(i) == EventKind::Invlpg && ev[i].va == ev[e].va &&
				    po_.contains(*inv, i) && po_.contains(i, e))
					add(WfRule::WF5, {w, i, e}, "an Invlpg evicts the walk before the event");
		auto own = p_.walk_of(e);
		if (own && *own != w)
			add(WfRule::WF5, {*own, e}, "event ignores the walk it invoked");
		if (nsrc[e] == 1 && nsrc[w] == 1 && !(map[e] == map[w]))
			add(WfRule::WF5, {w, e}, "event's mapping differs from its walk's");
	}

	// WF7
	co_pa.for_each([&](EventId a, EventId b) {
		if (ev[a].target != ev[b].target)
			add(WfRule::WF7, {a, b}, "co_pa relates PTE writes to different PAs");
	});
	std::map<Pa, std::vector<EventId>> aliases;
	for (EventId e = 0; e < n_; ++e)
		if (kind(e) == EventKind::PteWrite)
			aliases[ev[e].target].push_back(e);
	for (const auto &[pa, members] : aliases)
		total_order(co_pa, members, WfRule::WF7, "co_pa");
}

} // namespace

WellFormednessError::WellFormednessError(std::vector<WfViolation> v)
	: std::runtime_error(join_messages(v)), violations_(std::move(v))
{}

std::vector<WfViolation> validate_program(const Program &p, ValidateOptions opts)
{
	Checker c(p);
	c.structural(opts);
	return c.take();
}

std::vector<WfViolation> validate(const ExecutionGraph &g, ValidateOptions opts)
{
	ExecChecker c(g);
	c.structural(opts);
	c.execution();
	return c.take();
}

std::vector<EventId> useless_invlpgs(const Program &p)
{
	std::vector<EventId> out;
	std::vector<bool> has_pred(p.size(), false);
	p.remap.for_each([&](EventId, EventId i) {
		if (i < p.size())
			has_pred[i] = true;
	});
	for (EventId i = 0; i < p.size(); ++i) {
		if (p.events[i].kind != EventKind::Invlpg || has_pred[i])
			continue;
		bool used = false;
		if (i < p.po.universe())
			p.po.successors(i).for_each([&](EventId e) {
				if (e < p.size() && is_data(p.events[e].kind) && p.events[e].va == p.events[i].va)
					used = true;
			});
		if (!used)
			out.push_back(i);
	}
	return out;
}

std::pair<Va, Pa> effective_mapping(const ExecutionGraph &g, EventId e)
{
	if (e >= g.size())
		throw std::invalid_argument("no event with id " + std::to_string(e));
	const auto &x = g[e];
	if (!is_data(x.kind) && x.kind != EventKind::PtWalk)
		throw std::invalid_argument("event " + std::to_string(e) + " does not use a mapping");
	auto m = g.mapping(e);
	switch (m.kind) {
	case MappingSource::Kind::Init:
		if (x.va.id >= g.program.init.size())
			break;
		return {x.va, g.program.init[x.va.id]};
	case MappingSource::Kind::Write:
		return {x.va, g[m.write].target};
	case MappingSource::Kind::None:
		break;
	}
	throw std::invalid_argument("event " + std::to_string(e) + " has no mapping");
}

} // namespace mtm
