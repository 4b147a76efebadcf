#include "mtm/relax.hpp"

#include <algorithm>

namespace mtm {

std::string describe(const RelaxationUnit &u, const std::vector<std::string> &labels)
{
	auto name = [&](EventId e) { return e < labels.size() ? labels[e] : std::to_string(e); };
	if (u.kind == RelaxationUnit::Kind::RemoveRmwDependency)
		return "rmw(" + name(u.rmw_pair.first) + "," + name(u.rmw_pair.second) + ")";
	std::string s = "{";
	for (std::size_t i = 0; i < u.events.size(); ++i)
		s += (i ? " " : "") + name(u.events[i]);
	return s + "}";
}

std::vector<RelaxationUnit> relaxation_units(const Program &p)
{
	std::vector<RelaxationUnit> out;
	std::vector<bool> remapped(p.size(), false);
	p.remap.for_each([&](EventId, EventId i) {
		if (i < p.size())
			remapped[i] = true;
	});
	for (EventId e = 0; e < p.size(); ++e) {
		auto k = p.events[e].kind;
		RelaxationUnit u{RelaxationUnit::Kind::RemoveUserEvent, e, {e}, {}};
		if (k == EventKind::UserRead || k == EventKind::UserWrite || k == EventKind::PteWrite) {
			if (e < p.ghost.universe())
				p.ghost.successors(e).for_each([&](EventId g) { u.events.push_back(g); });
			if (k == EventKind::PteWrite && e < p.remap.universe())
				p.remap.successors(e).for_each([&](EventId i) { u.events.push_back(i); });
		} else if (k == EventKind::Invlpg && !remapped[e]) {
			u.kind = RelaxationUnit::Kind::RemoveSpuriousInvlpg;
		} else if (k == EventKind::Fence) {
			u.kind = RelaxationUnit::Kind::RemoveFence;
		} else {
			continue;
		}
		std::sort(u.events.begin(), u.events.end());
		out.push_back(std::move(u));
	}
	for (auto [r, w] : p.rmw.pairs())
		out.push_back({RelaxationUnit::Kind::RemoveRmwDependency, r, {}, {r, w}});
	return out;
}

Removal removal_of(const Program &p, const std::vector<const RelaxationUnit *> &units)
{
	Removal r{EventSet::all(p.size()), Relation(p.size())};
	for (const auto *u : units) {
		for (auto e : u->events)
			r.keep.erase(e);
		if (u->kind == RelaxationUnit::Kind::RemoveRmwDependency)
			r.rmw_dropped.insert(u->rmw_pair);
	}
	return r;
}

namespace {

std::vector<EventId> new_ids(const Program &p, const EventSet &keep, std::size_t &count)
{
	std::vector<EventId> to(p.size(), static_cast<EventId>(-1));
	count = 0;
	for (EventId e = 0; e < p.size(); ++e)
		if (keep.contains(e))
			to[e] = static_cast<EventId>(count++);
	return to;
}

Relation remap_rel(const Relation &r, const std::vector<EventId> &to, std::size_t n)
{
	Relation out(n);
	r.for_each([&](EventId a, EventId b) {
		if (a < to.size() && b < to.size() && to[a] != static_cast<EventId>(-1) &&
		    to[b] != static_cast<EventId>(-1))
			out.insert(to[a], to[b]);
	});
	return out;
}

} // namespace

Program restrict_program(const Program &p, const Removal &r)
{
	std::size_t n = 0;
	auto to = new_ids(p, r.keep, n);
	Program q;
	q.events.reserve(n);
	for (EventId e = 0; e < p.size(); ++e)
		if (r.keep.contains(e))
			q.events.push_back(p.events[e]);
	q.po = remap_rel(p.po, to, n);
	q.ghost = remap_rel(p.ghost, to, n);
	q.remap = remap_rel(p.remap, to, n);
	q.rmw = remap_rel(p.rmw - r.rmw_dropped, to, n);
	q.init = p.init;
	q.va_names = p.va_names;
	q.pa_names = p.pa_names;
	return q;
}

ExecutionGraph restrict_graph(const ExecutionGraph &g, const Removal &r)
{
	std::size_t n = 0;
	auto to = new_ids(g.program, r.keep, n);
	ExecutionGraph h;
	h.program = restrict_program(g.program, r);
	h.rf = remap_rel(g.rf, to, n);
	h.co = remap_rel(g.co, to, n);
	h.rf_ptw = remap_rel(g.rf_ptw, to, n);
	h.rf_pa = remap_rel(g.rf_pa, to, n);
	h.co_pa = remap_rel(g.co_pa, to, n);
	h.rf_pa_init = EventSet(n);
	g.rf_pa_init.for_each([&](EventId e) {
		if (e < to.size() && to[e] != static_cast<EventId>(-1))
			h.rf_pa_init.insert(to[e]);
	});
	return h;
}

namespace {

bool satisfies_all(const ExecutionGraph &g, const Model &m)
{
	auto d = derive_unchecked(g);
	return std::all_of(m.axioms.begin(), m.axioms.end(), [&](const Axiom &a) { return satisfies(g, d, a); });
}

} // namespace

bool is_minimal(const ExecutionGraph &g, const Model &m)
{
	for (const auto &u : relaxation_units(g.program))
		if (!satisfies_all(restrict_graph(g, removal_of(g.program, {&u})), m))
			return false;
	return true;
}

MinimalityChecker::MinimalityChecker(const Program &p, const Model &m) : m_(m)
{
	for (const auto &u : relaxation_units(p)) {
		auto r = removal_of(p, {&u});
		programs_.push_back(restrict_program(p, r));
		removals_.push_back(std::move(r));
	}
}

bool MinimalityChecker::minimal(const ExecutionGraph &g) const
{
	for (std::size_t i = 0; i < removals_.size(); ++i) {
		std::size_t n = 0;
		auto to = new_ids(g.program, removals_[i].keep, n);
		ExecutionGraph h;
		h.program = programs_[i];
		h.rf = remap_rel(g.rf, to, n);
		h.co = remap_rel(g.co, to, n);
		h.rf_ptw = remap_rel(g.rf_ptw, to, n);
		h.rf_pa = remap_rel(g.rf_pa, to, n);
		h.co_pa = remap_rel(g.co_pa, to, n);
		h.rf_pa_init = EventSet(n);
		g.rf_pa_init.for_each([&](EventId e) {
			if (to[e] != static_cast<EventId>(-1))
				h.rf_pa_init.insert(to[e]);
		});
		if (!satisfies_all(h, m_))
			return false;
	}
	return true;
}

} // namespace mtm
