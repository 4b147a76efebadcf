#include "support.hpp"

#include "mtm/oracle.hpp"
#include "mtm/relax.hpp"
#include "mtm/wellformed.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#ifndef MTM_TEST_DATA
#error "MTM_TEST_DATA must point at tests/data"
#endif

namespace mtm::testing {

std::string data_path(const std::string &rel) { return std::string(MTM_TEST_DATA) + "/" + rel; }

EltDocument load_data(const std::string &rel) { return read_elt_file(data_path(rel)); }

Program parse_program(const std::string &elt_text) { return parse_elt(elt_text).program; }

std::string exec_key(const ExecutionGraph &g)
{
	std::ostringstream s;
	auto dump = [&](const char *tag, const Relation &r) {
		s << tag << ':';
		for (auto [a, b] : r.pairs())
			s << a << '>' << b << ' ';
		s << ';';
	};
	dump("rf", g.rf);
	dump("co", g.co);
	dump("ptw", g.rf_ptw);
	dump("pa", g.rf_pa);
	dump("copa", g.co_pa);
	s << "init:";
	for (auto e : g.rf_pa_init.elements())
		s << e << ' ';
	return s.str();
}

namespace {

// Odometer over a vector of choice counts.
bool next_choice(std::vector<std::size_t> &idx, const std::vector<std::size_t> &sizes)
{
	for (std::size_t i = 0; i < idx.size(); ++i) {
		if (++idx[i] < sizes[i])
			return true;
		idx[i] = 0;
	}
	return false;
}

} // namespace

std::set<std::string> brute_force_executions(const Program &p)
{
	const auto n = static_cast<EventId>(p.size());
	std::vector<EventId> reads, writes, ptes, walks, data;
	for (EventId e = 0; e < n; ++e) {
		auto k = p.events[e].kind;
		if (k == EventKind::UserRead || k == EventKind::PtWalk)
			reads.push_back(e);
		if (k == EventKind::UserWrite || k == EventKind::PteWrite || k == EventKind::DirtyBitWrite)
			writes.push_back(e);
		if (k == EventKind::PteWrite)
			ptes.push_back(e);
		if (k == EventKind::PtWalk)
			walks.push_back(e);
		if (k == EventKind::UserRead || k == EventKind::UserWrite)
			data.push_back(e);
	}
	std::vector<EventId> mapped = data;
	mapped.insert(mapped.end(), walks.begin(), walks.end());

	std::set<std::string> out;
	if (!data.empty() && walks.empty())
		return out;

	// choice vector: rf per read (0 = init), walk per data event, mapping per
	// mapped event (0 = init)
	std::vector<std::size_t> sizes;
	for (std::size_t i = 0; i < reads.size(); ++i)
		sizes.push_back(writes.size() + 1);
	for (std::size_t i = 0; i < data.size(); ++i)
		sizes.push_back(walks.size());
	for (std::size_t i = 0; i < mapped.size(); ++i)
		sizes.push_back(ptes.size() + 1);

	std::vector<EventId> worder = writes;
	std::vector<EventId> porder = ptes;
	std::vector<std::size_t> idx(sizes.size(), 0);
	do {
		ExecutionGraph g;
		g.program = p;
		g.rf = Relation(n);
		g.rf_ptw = Relation(n);
		g.rf_pa = Relation(n);
		g.rf_pa_init = EventSet(n);
		std::size_t k = 0;
		for (auto r : reads) {
			auto c = idx[k++];
			if (c)
				g.rf.insert(writes[c - 1], r);
		}
		for (auto d : data)
			g.rf_ptw.insert(walks[idx[k++]], d);
		std::vector<std::optional<Pa>> pa(n);
		for (auto m : mapped) {
			auto c = idx[k++];
			if (c) {
				g.rf_pa.insert(ptes[c - 1], m);
				pa[m] = p.events[ptes[c - 1]].target;
			} else {
				g.rf_pa_init.insert(m);
				pa[m] = p.init[p.events[m].va.id];
			}
		}
		// location of a write, computed here rather than by derive()
		auto loc = [&](EventId w) -> std::pair<int, std::uint32_t> {
			const auto &x = p.events[w];
			if (x.kind == EventKind::UserWrite)
				return {0, pa[w] ? pa[w]->id : 9999};
			return {1, x.va.id};
		};
		std::sort(worder.begin(), worder.end());
		do {
			Relation co(n);
			for (std::size_t i = 0; i < worder.size(); ++i)
				for (std::size_t j = i + 1; j < worder.size(); ++j)
					if (loc(worder[i]) == loc(worder[j]))
						co.insert(worder[i], worder[j]);
			g.co = co;
			std::sort(porder.begin(), porder.end());
			do {
				Relation co_pa(n);
				for (std::size_t i = 0; i < porder.size(); ++i)
					for (std::size_t j = i + 1; j < porder.size(); ++j)
						if (p.events[porder[i]].target == p.events[porder[j]].target)
							co_pa.insert(porder[i], porder[j]);
				g.co_pa = co_pa;
				if (validate(g).empty())
					out.insert(exec_key(g));
			} while (std::next_permutation(porder.begin(), porder.end()));
		} while (std::next_permutation(worder.begin(), worder.end()));
	} while (next_choice(idx, sizes));
	return out;
}

namespace {

enum class Tok : std::uint8_t { R, W, Rmw, P, S, X };
struct Token {
	Tok t;
	std::uint32_t va = 0, pa = 0; // pa: P target; X: PTE index
	bool walk = false, walk2 = false;
};

std::size_t token_cost(const Token &k)
{
	switch (k.t) {
	case Tok::R: return 1 + k.walk;
	case Tok::W: return 2 + k.walk;
	case Tok::Rmw: return 3 + k.walk + k.walk2;
	case Tok::P: return 2;
	case Tok::S: return 1;
	case Tok::X: return 1;
	}
	return 0;
}

std::optional<Program> build(const std::vector<std::vector<Token>> &threads, std::uint32_t vas, std::uint32_t pas)
{
	// PTE writes numbered thread by thread; each needs exactly one X on every
	// other thread and none on its own.
	std::vector<std::size_t> pte_thread;
	for (std::size_t t = 0; t < threads.size(); ++t)
		for (const auto &k : threads[t])
			if (k.t == Tok::P)
				pte_thread.push_back(t);
	for (std::size_t t = 0; t < threads.size(); ++t) {
		std::vector<int> seen(pte_thread.size(), 0);
		for (const auto &k : threads[t])
			if (k.t == Tok::X) {
				if (k.pa >= pte_thread.size())
					return std::nullopt;
				++seen[k.pa];
			}
		for (std::size_t g = 0; g < pte_thread.size(); ++g)
			if (seen[g] != (pte_thread[g] == t ? 0 : 1))
				return std::nullopt;
	}

	Program p;
	for (std::uint32_t v = 0; v < vas; ++v) {
		p.init.push_back(Pa{v});
		p.va_names.push_back(default_va_name(v));
	}
	for (std::uint32_t a = 0; a < std::max(vas, pas); ++a)
		p.pa_names.push_back(default_pa_name(a));
	std::vector<EventId> pte_id;
	std::vector<std::pair<std::size_t, EventId>> remote;
	for (std::size_t t = 0; t < threads.size(); ++t) {
		std::vector<EventId> users;
		auto add_user = [&](EventKind kind, std::uint32_t va) {
			auto id = static_cast<EventId>(p.events.size());
			p.events.push_back({kind, static_cast<ThreadId>(t), Va{va}, Pa{}});
			for (auto u : users)
				p.po.insert(u, id);
			users.push_back(id);
			return id;
		};
		auto add_ghost = [&](EventId inv, EventKind kind) {
			auto id = static_cast<EventId>(p.events.size());
			p.events.push_back({kind, static_cast<ThreadId>(t), p.events[inv].va, Pa{}});
			p.ghost.insert(inv, id);
		};
		for (const auto &k : threads[t]) {
			switch (k.t) {
			case Tok::R: {
				auto r = add_user(EventKind::UserRead, k.va);
				if (k.walk)
					add_ghost(r, EventKind::PtWalk);
				break;
			}
			case Tok::W: {
				auto w = add_user(EventKind::UserWrite, k.va);
				add_ghost(w, EventKind::DirtyBitWrite);
				if (k.walk)
					add_ghost(w, EventKind::PtWalk);
				break;
			}
			case Tok::Rmw: {
				auto r = add_user(EventKind::UserRead, k.va);
				if (k.walk)
					add_ghost(r, EventKind::PtWalk);
				auto w = add_user(EventKind::UserWrite, k.va);
				add_ghost(w, EventKind::DirtyBitWrite);
				if (k.walk2)
					add_ghost(w, EventKind::PtWalk);
				p.rmw.insert(r, w);
				break;
			}
			case Tok::P: {
				auto pw = add_user(EventKind::PteWrite, k.va);
				p.events[pw].target = Pa{k.pa};
				pte_id.push_back(pw);
				auto i = add_user(EventKind::Invlpg, k.va);
				p.remap.insert(pw, i);
				break;
			}
			case Tok::S: add_user(EventKind::Invlpg, k.va); break;
			case Tok::X: {
				auto i = add_user(EventKind::Invlpg, 0);
				remote.emplace_back(k.pa, i);
				break;
			}
			}
		}
	}
	for (auto [g, i] : remote) {
		p.events[i].va = p.events[pte_id[g]].va;
		p.remap.insert(pte_id[g], i);
	}
	const auto n = p.size();
	p.po.resize(n);
	p.ghost.resize(n);
	p.remap.resize(n);
	p.rmw.resize(n);
	return p;
}

// The synthesis space restrictions that are choices rather than rules: a
// thread holds something besides remote Invlpgs, and a PTE write does not
// point its VA back at that VA's own initial frame.
bool in_space(const Program &p)
{
	for (auto t : p.threads()) {
		bool local = false;
		for (auto e : p.thread_events(t))
			local = local || p.events[e].kind != EventKind::Invlpg || p.remap.predecessors(e).empty() ||
				p.events[*p.remap.predecessors(e).elements().begin()].thread == t;
		if (!local)
			return false;
	}
	for (const auto &e : p.events)
		if (e.kind == EventKind::PteWrite && e.target == p.init[e.va.id])
			return false;
	return true;
}

} // namespace

std::map<std::string, std::set<std::string>> naive_suites(const NaiveOptions &opts)
{
	std::vector<Token> alphabet;
	for (std::uint32_t v = 0; v < opts.vas; ++v) {
		for (bool w : {false, true}) {
			alphabet.push_back({Tok::R, v, 0, w, false});
			alphabet.push_back({Tok::W, v, 0, w, false});
			if (opts.rmw)
				for (bool w2 : {false, true})
					alphabet.push_back({Tok::Rmw, v, 0, w, w2});
		}
		for (std::uint32_t a = 0; a < opts.pas; ++a)
			alphabet.push_back({Tok::P, v, a});
		alphabet.push_back({Tok::S, v});
	}
	for (std::uint32_t g = 0; g < opts.bound; ++g)
		alphabet.push_back({Tok::X, 0, g});

	std::set<std::string> forms;
	std::vector<Program> programs;
	std::vector<std::vector<Token>> threads;
	auto consider = [&] {
		auto p = build(threads, opts.vas, opts.pas);
		if (!p || p->size() > opts.bound || !in_space(*p))
			return;
		bool write = std::any_of(p->events.begin(), p->events.end(), [](const Event &e) {
			return e.kind == EventKind::UserWrite || e.kind == EventKind::PteWrite;
		});
		if (!write || !validate_program(*p, {true}).empty())
			return;
		if (forms.insert(canonical_form(*p)).second)
			programs.push_back(std::move(*p));
	};
	// threads are filled one after another, each non-empty
	std::function<void(std::size_t)> fill = [&](std::size_t budget) {
		if (!threads.back().empty()) {
			consider();
			threads.emplace_back();
			fill(budget);
			threads.pop_back();
		}
		for (const auto &k : alphabet) {
			auto c = token_cost(k);
			if (c > budget)
				continue;
			threads.back().push_back(k);
			fill(budget - c);
			threads.back().pop_back();
		}
	};
	threads.emplace_back();
	fill(opts.bound);

	auto m = x86t_elt();
	std::map<std::string, std::set<std::string>> out;
	for (const auto &ax : m.axioms)
		out[ax.name];
	for (const auto &p : programs) {
		std::set<std::string> found;
		for (const auto &g : all_executions(p, {p.size(), false})) {
			auto v = check(g, m);
			if (v.consistent)
				continue;
			bool minimal = is_minimal(g, m);
			for (const auto &x : v.violated)
				if (minimal)
					found.insert(x.axiom);
		}
		bool has_rmw = !p.rmw.empty();
		for (const auto &a : found)
			if (!has_rmw || a == "rmw_atomicity")
				out[a].insert(canonical_form(p));
	}
	return out;
}

Program random_isomorph(const Program &p, std::mt19937 &rng)
{
	auto perm = [&](std::size_t n) {
		std::vector<std::size_t> v(n);
		std::iota(v.begin(), v.end(), 0);
		std::shuffle(v.begin(), v.end(), rng);
		return v;
	};
	std::uint32_t npa = static_cast<std::uint32_t>(p.pa_names.size());
	for (auto a : p.init)
		npa = std::max(npa, a.id + 1);
	for (const auto &e : p.events)
		if (e.kind == EventKind::PteWrite)
			npa = std::max(npa, e.target.id + 1);
	auto q = p;
	q.pa_names.resize(npa);
	for (std::uint32_t a = static_cast<std::uint32_t>(p.pa_names.size()); a < npa; ++a)
		q.pa_names[a] = default_pa_name(a);
	return permute(q, perm(p.threads().size()), perm(p.init.size()), perm(npa), perm(p.size()));
}

} // namespace mtm::testing
