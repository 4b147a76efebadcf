#include "mtm/canon.hpp"

#include "mtm/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace mtm {

namespace {

struct EventInfo {
	bool walk = false, db = false, rmw_read = false, rmw_write = false;
	std::optional<EventId> remap_pred;
};

class Encoder {
public:
	explicit Encoder(const Program &p) : p_(p), info_(p.size())
	{
		for (EventId e = 0; e < p.size(); ++e) {
			info_[e].walk = p.walk_of(e).has_value();
			info_[e].db = p.dirty_bit_of(e).has_value();
		}
		p.rmw.for_each([&](EventId r, EventId w) {
			info_[r].rmw_read = true;
			info_[w].rmw_write = true;
		});
		p.remap.for_each([&](EventId pw, EventId i) { info_[i].remap_pred = pw; });
		used_va_.assign(p.init.size(), false);
		for (const auto &e : p.events)
			if (e.kind != EventKind::Fence && e.va.id < used_va_.size())
				used_va_[e.va.id] = true;
		for (auto t : p.threads())
			threads_.push_back(p.thread_events(t));
	}

	std::string canonical()
	{
		// Group threads by a renaming-invariant signature; only orders that
		// sort the signatures are tried.
		std::vector<std::pair<std::string, std::size_t>> sig;
		for (std::size_t i = 0; i < threads_.size(); ++i)
			sig.emplace_back(signature(threads_[i]), i);
		std::sort(sig.begin(), sig.end());
		std::vector<std::size_t> order;
		std::vector<std::pair<std::size_t, std::size_t>> groups; // [begin, end)
		for (std::size_t i = 0; i < sig.size(); ++i) {
			order.push_back(sig[i].second);
			if (i == 0 || sig[i].first != sig[i - 1].first)
				groups.emplace_back(i, i + 1);
			else
				groups.back().second = i + 1;
		}
		for (auto &[b, e] : groups)
			std::sort(order.begin() + static_cast<std::ptrdiff_t>(b), order.begin() + static_cast<std::ptrdiff_t>(e));
		std::optional<std::string> best;
		permute_groups(order, groups, 0, best);
		return best.value_or("");
	}

private:
	void permute_groups(std::vector<std::size_t> &order, const std::vector<std::pair<std::size_t, std::size_t>> &groups,
			    std::size_t gi, std::optional<std::string> &best)
	{
		if (gi == groups.size()) {
			auto s = encode(order);
			if (!best || s < *best)
				best = std::move(s);
			return;
		}
		auto b = order.begin() + static_cast<std::ptrdiff_t>(groups[gi].first);
		auto e = order.begin() + static_cast<std::ptrdiff_t>(groups[gi].second);
		do {
			permute_groups(order, groups, gi + 1, best);
		} while (std::next_permutation(b, e));
	}

	void flags(std::string &s, EventId e) const
	{
		const auto &in = info_[e];
		if (in.db)
			s += 'd';
		if (in.walk)
			s += 'p';
		if (in.rmw_read || in.rmw_write)
			s += 'm';
	}

	std::string signature(const std::vector<EventId> &seq) const
	{
		std::string s;
		for (auto e : seq) {
			const auto &x = p_.events[e];
			switch (x.kind) {
			case EventKind::UserRead: s += 'R'; break;
			case EventKind::UserWrite: s += 'W'; break;
			case EventKind::PteWrite: s += 'P'; break;
			case EventKind::Invlpg:
				s += 'I';
				if (info_[e].remap_pred)
					s += p_.events[*info_[e].remap_pred].thread == x.thread ? 'l' : 'r';
				break;
			case EventKind::Fence: s += 'F'; break;
			default: break;
			}
			flags(s, e);
			s += ' ';
		}
		return s;
	}

	std::string encode(const std::vector<std::size_t> &order) const
	{
		std::vector<std::pair<std::size_t, std::size_t>> pos(p_.size());
		for (std::size_t t = 0; t < order.size(); ++t) {
			const auto &seq = threads_[order[t]];
			for (std::size_t i = 0; i < seq.size(); ++i)
				pos[seq[i]] = {t, i};
		}
		std::vector<int> va_num(p_.init.size(), -1);
		int next_va = 0;
		std::map<Pa, int> fresh;
		auto va = [&](Va v) {
			if (va_num[v.id] < 0)
				va_num[v.id] = next_va++;
			return std::to_string(va_num[v.id]);
		};
		auto target = [&](Pa a) -> std::string {
			for (std::uint32_t u = 0; u < p_.init.size(); ++u)
				if (used_va_[u] && p_.init[u] == a)
					return "i" + va(Va{u});
			auto [it, inserted] = fresh.emplace(a, static_cast<int>(fresh.size()));
			return "f" + std::to_string(it->second);
		};

		std::string s;
		for (std::size_t t = 0; t < order.size(); ++t) {
			if (t)
				s += '|';
			for (auto e : threads_[order[t]]) {
				const auto &x = p_.events[e];
				switch (x.kind) {
				case EventKind::UserRead: s += 'R' + va(x.va); break;
				case EventKind::UserWrite: s += 'W' + va(x.va); break;
				case EventKind::PteWrite: {
					s += 'P' + va(x.va);
					s += '>' + target(x.target);
					break;
				}
				case EventKind::Invlpg:
					s += 'I' + va(x.va);
					if (auto pw = info_[e].remap_pred)
						s += '@' + std::to_string(pos[*pw].first) + '.' + std::to_string(pos[*pw].second);
					break;
				case EventKind::Fence: s += 'F'; break;
				default: break;
				}
				flags(s, e);
				s += ',';
			}
		}
		return s;
	}

	const Program &p_;
	std::vector<EventInfo> info_;
	std::vector<bool> used_va_;
	std::vector<std::vector<EventId>> threads_;
};

} // namespace

std::string canonical_form(const Program &p) { return Encoder(p).canonical(); }

std::vector<Program> dedup(const std::vector<Program> &suite)
{
	std::vector<Program> out;
	std::unordered_map<std::string, bool> seen;
	for (const auto &p : suite)
		if (seen.emplace(canonical_form(p), true).second)
			out.push_back(p);
	return out;
}

Program permute(const Program &p, const std::vector<std::size_t> &threads, const std::vector<std::size_t> &vas,
		const std::vector<std::size_t> &pas, const std::vector<std::size_t> &events)
{
	auto tids = p.threads();
	std::map<ThreadId, ThreadId> tmap;
	for (std::size_t i = 0; i < tids.size(); ++i)
		tmap[tids[i]] = static_cast<ThreadId>(threads.at(i));

	Program q;
	q.events.resize(p.size());
	for (EventId e = 0; e < p.size(); ++e) {
		auto x = p.events[e];
		x.thread = tmap[x.thread];
		if (x.kind != EventKind::Fence)
			x.va = Va{static_cast<std::uint32_t>(vas.at(x.va.id))};
		if (x.kind == EventKind::PteWrite)
			x.target = Pa{static_cast<std::uint32_t>(pas.at(x.target.id))};
		q.events[events.at(e)] = x;
	}
	auto rel = [&](const Relation &r) {
		Relation out(p.size());
		r.for_each([&](EventId a, EventId b) {
			out.insert(static_cast<EventId>(events.at(a)), static_cast<EventId>(events.at(b)));
		});
		return out;
	};
	q.po = rel(p.po);
	q.ghost = rel(p.ghost);
	q.remap = rel(p.remap);
	q.rmw = rel(p.rmw);
	q.init.resize(p.init.size());
	q.va_names.resize(p.va_names.size());
	for (std::size_t v = 0; v < p.init.size(); ++v) {
		q.init[vas.at(v)] = Pa{static_cast<std::uint32_t>(pas.at(p.init[v].id))};
		if (v < p.va_names.size())
			q.va_names[vas[v]] = p.va_names[v];
	}
	q.pa_names.resize(p.pa_names.size());
	for (std::size_t a = 0; a < p.pa_names.size(); ++a)
		q.pa_names[pas.at(a)] = p.pa_names[a];
	return q;
}

CompareResult compare(const Program &t, const std::vector<Program> &suite, CompareOptions opts)
{
	std::unordered_map<std::string, std::size_t> forms;
	for (std::size_t i = 0; i < suite.size(); ++i)
		forms.emplace(canonical_form(suite[i]), i);

	CompareResult res;
	if (auto it = forms.find(canonical_form(t)); it != forms.end()) {
		res.kind = CompareResult::Kind::Verbatim;
		res.match = it->second;
		return res;
	}

	auto units = relaxation_units(t);
	const auto n = units.size();
	const auto max_k = n <= opts.exhaustive_units ? n : std::min(n, opts.max_subset_size);
	for (std::size_t k = 1; k <= max_k; ++k) {
		// combinations of k unit indices in lexicographic order
		std::vector<std::size_t> idx(k);
		std::iota(idx.begin(), idx.end(), 0);
		while (true) {
			std::vector<const RelaxationUnit *> chosen;
			for (auto i : idx)
				chosen.push_back(&units[i]);
			auto reduced = restrict_program(t, removal_of(t, chosen));
			if (auto it = forms.find(canonical_form(reduced)); it != forms.end()) {
				res.kind = CompareResult::Kind::ReducibleTo;
				res.match = it->second;
				for (auto *u : chosen)
					res.removed.push_back(*u);
				return res;
			}
			std::size_t i = k;
			while (i > 0 && idx[i - 1] == n - k + (i - 1))
				--i;
			if (i == 0)
				break;
			++idx[i - 1];
			for (auto j = i; j < k; ++j)
				idx[j] = idx[j - 1] + 1;
		}
	}
	return res;
}

std::optional<std::string> screen(const Program &t, const Model *m)
{
	bool writes = std::any_of(t.events.begin(), t.events.end(),
				  [](const Event &e) { return e.kind == EventKind::UserWrite || e.kind == EventKind::PteWrite; });
	if (!writes)
		return std::string("no user-facing write");
	if (m && classify(t, *m).forbidden == 0)
		return std::string("no forbidden execution");
	return std::nullopt;
}

} // namespace mtm
