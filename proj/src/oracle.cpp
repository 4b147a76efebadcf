#include "mtm/oracle.hpp"

#include "mtm/wellformed.hpp"

#include <algorithm>
#include <map>

namespace mtm {

namespace {

constexpr int kInit = -1;

class Enumerator {
public:
	Enumerator(const Program &p, const ExecutionVisitor &visit, EnumerateOptions opts)
		: p_(p), n_(p.size()), visit_(visit), opts_(opts)
	{
		g_.program = p;
		prepare();
	}

	std::size_t run()
	{
		if (!feasible_)
			return 0;
		choose_walk(0);
		return emitted_;
	}

private:
	void prepare();
	void choose_walk(std::size_t i);
	void choose_walk_rf(std::size_t i);
	void resolve_mappings();
	void choose_cycle(std::size_t i);
	void place_data();
	void order_groups(std::size_t gi);
	void choose_read_rf(std::size_t i);
	void order_co_pa(std::size_t gi);
	void emit();
	bool dirty_bits_hold() const;

	const Program &p_;
	std::size_t n_;
	const ExecutionVisitor &visit_;
	EnumerateOptions opts_;
	ExecutionGraph g_;
	std::size_t emitted_ = 0;
	bool stop_ = false;
	bool feasible_ = true;

	std::vector<EventId> data_, walks_;
	std::vector<EventId> walk_inv_;                // by event id
	std::vector<std::vector<EventId>> eligible_;  // per data index
	std::vector<std::vector<int>> walk_choices_;  // per walk index
	std::vector<std::vector<EventId>> pte_writes_; // PteWrites per VA id
	std::vector<std::vector<EventId>> pte_loc_;    // PteWrites and dbs per VA id

	// current choices
	std::vector<EventId> ptw_of_;     // per event id (data only)
	std::vector<int> walk_src_;       // per event id (walks only)
	std::vector<MappingSource> map_;  // per event id
	std::vector<std::vector<EventId>> cycles_; // walks sharing a free mapping
	std::vector<std::vector<EventId>> co_groups_;
	std::vector<EventId> reads_;
	std::vector<std::vector<int>> read_choices_;
	std::vector<int> read_src_;
	std::vector<std::vector<EventId>> pa_groups_;
};

void Enumerator::prepare()
{
	const auto &ev = p_.events;
	walk_inv_.assign(n_, 0);
	p_.ghost.for_each([&](EventId inv, EventId g) { walk_inv_[g] = inv; });
	pte_writes_.assign(p_.init.size(), {});
	pte_loc_.assign(p_.init.size(), {});
	for (EventId e = 0; e < n_; ++e) {
		auto k = ev[e].kind;
		if (is_data(k))
			data_.push_back(e);
		if (k == EventKind::PtWalk)
			walks_.push_back(e);
		if (k == EventKind::PteWrite)
			pte_writes_[ev[e].va.id].push_back(e);
		if (k == EventKind::PteWrite || k == EventKind::DirtyBitWrite)
			pte_loc_[ev[e].va.id].push_back(e);
	}

	for (auto e : data_) {
		std::vector<EventId> ok;
		if (auto own = p_.walk_of(e)) {
			ok.push_back(*own);
		} else {
			for (auto w : walks_) {
				auto inv = walk_inv_[w];
				if (ev[inv].thread != ev[e].thread || ev[w].va != ev[e].va || !p_.po.contains(inv, e))
					continue;
				bool evicted = false;
				for (EventId i = 0; i < n_ && !evicted; ++i)
					evicted = ev[i].kind == EventKind::Invlpg && ev[i].va == ev[e].va &&
						  p_.po.contains(inv, i) && p_.po.contains(i, e);
				if (!evicted)
					ok.push_back(w);
			}
		}
		if (ok.empty())
			feasible_ = false;
		eligible_.push_back(std::move(ok));
	}

	for (auto w : walks_) {
		std::vector<int> c{kInit};
		for (auto s : pte_loc_[ev[w].va.id])
			c.push_back(static_cast<int>(s));
		walk_choices_.push_back(std::move(c));
	}

	ptw_of_.assign(n_, 0);
	walk_src_.assign(n_, kInit);
	map_.assign(n_, {});
	read_src_.assign(n_, kInit);
}

void Enumerator::choose_walk(std::size_t i)
{
	if (stop_)
		return;
	if (i == data_.size()) {
		choose_walk_rf(0);
		return;
	}
	for (auto w : eligible_[i]) {
		ptw_of_[data_[i]] = w;
		choose_walk(i + 1);
	}
}

void Enumerator::choose_walk_rf(std::size_t i)
{
	if (stop_)
		return;
	if (i == walks_.size()) {
		resolve_mappings();
		return;
	}
	for (auto c : walk_choices_[i]) {
		walk_src_[walks_[i]] = c;
		choose_walk_rf(i + 1);
	}
}

// A walk's mapping is fixed by what it read, except when it read a dirty bit
// write: then it is the mapping of that write's invoker, i.e. of another
// walk. This is a functional graph over walks; every cycle in it leaves one
// free mapping shared by the cycle and everything leading into it.
void Enumerator::resolve_mappings()
{
	const auto &ev = p_.events;
	cycles_.clear();
	// -2 unvisited, -3 on current path, -1 fixed value in map_, >= 0 cycle id
	std::vector<int> root(n_, -2);
	for (auto w0 : walks_) {
		std::vector<EventId> path;
		EventId w = w0;
		int result = -1;
		MappingSource value;
		while (true) {
			if (root[w] == -3) {
				result = static_cast<int>(cycles_.size());
				cycles_.emplace_back();
				break;
			}
			if (root[w] != -2) {
				result = root[w];
				value = map_[w];
				break;
			}
			root[w] = -3;
			path.push_back(w);
			int s = walk_src_[w];
			if (s == kInit) {
				value = MappingSource::init();
				break;
			}
			auto src = static_cast<EventId>(s);
			if (ev[src].kind == EventKind::PteWrite) {
				value = MappingSource::from(src);
				break;
			}
			w = ptw_of_[walk_inv_[src]];
		}
		for (auto x : path) {
			root[x] = result;
			if (result >= 0)
				cycles_[static_cast<std::size_t>(result)].push_back(x);
			else
				map_[x] = value;
		}
	}
	choose_cycle(0);
}

void Enumerator::choose_cycle(std::size_t i)
{
	if (stop_)
		return;
	if (i == cycles_.size()) {
		place_data();
		return;
	}
	const auto &cyc = cycles_[i];
	auto va = p_.events[cyc.front()].va.id;
	std::vector<MappingSource> options{MappingSource::init()};
	for (auto pw : pte_writes_[va])
		options.push_back(MappingSource::from(pw));
	for (const auto &o : options) {
		for (auto w : cyc)
			map_[w] = o;
		choose_cycle(i + 1);
	}
}

void Enumerator::place_data()
{
	const auto &ev = p_.events;
	for (auto e : data_)
		map_[e] = map_[ptw_of_[e]];

	auto pa_of = [&](EventId e) {
		return map_[e].kind == MappingSource::Kind::Init ? p_.init[ev[e].va.id] : ev[map_[e].write].target;
	};

	// coherence groups: one per PTE location, one per PA written by users
	co_groups_.clear();
	for (const auto &loc : pte_loc_)
		if (loc.size() > 1)
			co_groups_.push_back(loc);
	std::map<Pa, std::vector<EventId>> by_pa;
	for (auto e : data_)
		if (ev[e].kind == EventKind::UserWrite)
			by_pa[pa_of(e)].push_back(e);
	for (auto &[pa, ws] : by_pa)
		if (ws.size() > 1)
			co_groups_.push_back(ws);

	reads_.clear();
	read_choices_.clear();
	for (auto e : data_) {
		if (ev[e].kind != EventKind::UserRead)
			continue;
		reads_.push_back(e);
		std::vector<int> c{kInit};
		auto it = by_pa.find(pa_of(e));
		if (it != by_pa.end())
			for (auto w : it->second)
				c.push_back(static_cast<int>(w));
		read_choices_.push_back(std::move(c));
	}

	std::map<Pa, std::vector<EventId>> aliases;
	for (EventId e = 0; e < n_; ++e)
		if (ev[e].kind == EventKind::PteWrite)
			aliases[ev[e].target].push_back(e);
	pa_groups_.clear();
	for (auto &[pa, ws] : aliases)
		if (ws.size() > 1)
			pa_groups_.push_back(ws);

	order_groups(0);
}

void Enumerator::order_groups(std::size_t gi)
{
	if (stop_)
		return;
	if (gi == co_groups_.size()) {
		if (dirty_bits_hold())
			choose_read_rf(0);
		return;
	}
	auto &grp = co_groups_[gi];
	std::sort(grp.begin(), grp.end());
	do {
		order_groups(gi + 1);
		if (stop_)
			return;
	} while (std::next_permutation(grp.begin(), grp.end()));
}

// A dirty bit write must leave the mapping its co predecessor wrote.
bool Enumerator::dirty_bits_hold() const
{
	const auto &ev = p_.events;
	auto check = [&](const std::vector<EventId> &order) {
		MappingSource held = MappingSource::init();
		for (auto x : order) {
			if (ev[x].kind == EventKind::PteWrite) {
				held = MappingSource::from(x);
				continue;
			}
			if (!(map_[walk_inv_[x]] == held))
				return false;
		}
		return true;
	};
	for (const auto &loc : pte_loc_)
		if (loc.size() == 1 && !check(loc))
			return false;
	for (const auto &grp : co_groups_)
		if (is_translation(ev[grp.front()].kind) && !check(grp))
			return false;
	return true;
}

void Enumerator::choose_read_rf(std::size_t i)
{
	if (stop_)
		return;
	if (i == reads_.size()) {
		order_co_pa(0);
		return;
	}
	for (auto c : read_choices_[i]) {
		read_src_[reads_[i]] = c;
		choose_read_rf(i + 1);
	}
}

void Enumerator::order_co_pa(std::size_t gi)
{
	if (stop_)
		return;
	if (gi == pa_groups_.size()) {
		emit();
		return;
	}
	auto &grp = pa_groups_[gi];
	std::sort(grp.begin(), grp.end());
	do {
		order_co_pa(gi + 1);
		if (stop_ || opts_.single_co_pa)
			return;
	} while (std::next_permutation(grp.begin(), grp.end()));
}

void Enumerator::emit()
{
	Relation rf(n_), co(n_), rf_ptw(n_), rf_pa(n_), co_pa(n_);
	EventSet init(n_);
	for (auto w : walks_)
		if (walk_src_[w] != kInit)
			rf.insert(static_cast<EventId>(walk_src_[w]), w);
	for (auto r : reads_)
		if (read_src_[r] != kInit)
			rf.insert(static_cast<EventId>(read_src_[r]), r);
	for (const auto &grp : co_groups_)
		for (std::size_t i = 0; i < grp.size(); ++i)
			for (std::size_t j = i + 1; j < grp.size(); ++j)
				co.insert(grp[i], grp[j]);
	for (const auto &grp : pa_groups_)
		for (std::size_t i = 0; i < grp.size(); ++i)
			for (std::size_t j = i + 1; j < grp.size(); ++j)
				co_pa.insert(grp[i], grp[j]);
	for (auto e : data_)
		rf_ptw.insert(ptw_of_[e], e);
	auto mapped = [&](EventId e) {
		if (map_[e].kind == MappingSource::Kind::Init)
			init.insert(e);
		else
			rf_pa.insert(map_[e].write, e);
	};
	for (auto e : data_)
		mapped(e);
	for (auto w : walks_)
		mapped(w);
	g_.rf = std::move(rf);
	g_.co = std::move(co);
	g_.rf_ptw = std::move(rf_ptw);
	g_.rf_pa = std::move(rf_pa);
	g_.co_pa = std::move(co_pa);
	g_.rf_pa_init = std::move(init);
	++emitted_;
	if (!visit_(g_))
		stop_ = true;
}

} // namespace

std::size_t enumerate_executions(const Program &p, const ExecutionVisitor &visit, EnumerateOptions opts)
{
	if (p.size() > opts.bound)
		throw BoundExceeded(p.size(), opts.bound);
	auto bad = validate_program(p);
	if (!bad.empty())
		throw WellFormednessError(std::move(bad));
	Enumerator en(p, visit, opts);
	return en.run();
}

std::vector<ExecutionGraph> all_executions(const Program &p, EnumerateOptions opts)
{
	std::vector<ExecutionGraph> out;
	enumerate_executions(p, [&](const ExecutionGraph &g) {
		out.push_back(g);
		return true;
	}, opts);
	return out;
}

Classification classify(const Program &p, const Model &m, EnumerateOptions opts)
{
	Classification c;
	enumerate_executions(p, [&](const ExecutionGraph &g) {
		auto v = check_derived(g, derive_unchecked(g), m);
		if (v.consistent) {
			++c.permitted;
			if (!c.first_permitted)
				c.first_permitted = g;
			return true;
		}
		++c.forbidden;
		if (!c.first_forbidden)
			c.first_forbidden = g;
		for (auto &x : v.violated) {
			++c.per_axiom[x.axiom];
			c.witness.emplace(x.axiom, x);
		}
		return true;
	}, opts);
	return c;
}

} // namespace mtm
