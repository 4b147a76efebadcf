#include "mtm/derive.hpp"

#include "mtm/wellformed.hpp"

#include <algorithm>
#include <array>

namespace mtm {

std::optional<Pa> DerivedRelations::effective_pa(EventId e) const
{
	if (e < effective_loc.size() && effective_loc[e].space == EffLoc::Space::Phys)
		return Pa{effective_loc[e].id};
	return std::nullopt;
}

namespace {

// Per thread, one slot per user event in po order: the event followed by
// the ghosts it invokes. Slots are ordered; events inside a slot are not.
std::vector<std::vector<std::vector<EventId>>> ghost_slots(const Program &p)
{
	const auto n = p.size();
	std::vector<std::vector<EventId>> ghosts(n);
	p.ghost.for_each([&](EventId inv, EventId g) {
		if (inv < n && g < n)
			ghosts[inv].push_back(g);
	});

	std::vector<std::size_t> rank(n, 0);
	p.po.for_each([&](EventId, EventId b) {
		if (b < n)
			++rank[b];
	});

	std::vector<std::vector<std::vector<EventId>>> out;
	for (auto t : p.threads()) {
		std::vector<EventId> users;
		for (EventId e = 0; e < n; ++e)
			if (p.events[e].thread == t && !is_ghost(p.events[e].kind))
				users.push_back(e);
		std::stable_sort(users.begin(), users.end(),
				 [&](EventId a, EventId b) { return rank[a] < rank[b]; });
		std::vector<std::vector<EventId>> slots;
		for (auto e : users) {
			slots.push_back({e});
			slots.back().insert(slots.back().end(), ghosts[e].begin(), ghosts[e].end());
		}
		out.push_back(std::move(slots));
	}
	return out;
}

} // namespace

DerivedRelations derive_unchecked(const ExecutionGraph &g)
{
	const auto &p = g.program;
	const auto n = p.size();
	const auto &ev = p.events;
	DerivedRelations d;

	d.gpo = Relation(n);
	for (const auto &slots : ghost_slots(p))
		for (std::size_t i = 0; i < slots.size(); ++i)
			for (std::size_t j = i + 1; j < slots.size(); ++j)
				for (auto a : slots[i])
					for (auto b : slots[j])
						d.gpo.insert(a, b);
	d.gpo_plus = transitive_closure(d.gpo);

	// Mapping sources and effective locations.
	std::vector<MappingSource> map(n);
	g.rf_pa.for_each([&](EventId pw, EventId e) {
		if (e < n)
			map[e] = MappingSource::from(pw);
	});
	g.rf_pa_init.for_each([&](EventId e) {
		if (e < n)
			map[e] = MappingSource::init();
	});

	d.mapped_pa.assign(n, std::nullopt);
	d.effective_loc.assign(n, EffLoc{});
	for (EventId e = 0; e < n; ++e) {
		const auto &x = ev[e];
		if (map[e].kind == MappingSource::Kind::Init) {
			if (x.va.id < p.init.size())
				d.mapped_pa[e] = p.init[x.va.id];
		} else if (map[e].kind == MappingSource::Kind::Write && map[e].write < n) {
			d.mapped_pa[e] = ev[map[e].write].target;
		}
		if (is_data(x.kind)) {
			if (d.mapped_pa[e])
				d.effective_loc[e] = EffLoc::phys(*d.mapped_pa[e]);
		} else if (is_translation(x.kind)) {
			d.effective_loc[e] = EffLoc::pte(x.va);
		}
	}
	const auto &loc = d.effective_loc;

	d.po_loc = Relation(n);
	d.gpo_plus.for_each([&](EventId a, EventId b) {
		if (!loc[a].none() && loc[a] == loc[b])
			d.po_loc.insert(a, b);
	});

	// fr: rf^-1;co, plus init readers before every write to their location.
	std::vector<std::optional<EventId>> rf_src(n);
	g.rf.for_each([&](EventId w, EventId r) {
		if (r < n)
			rf_src[r] = w;
	});
	d.fr = Relation(n);
	for (EventId r = 0; r < n; ++r) {
		if (!is_read_kind(ev[r].kind) || loc[r].none())
			continue;
		if (rf_src[r]) {
			if (*rf_src[r] < g.co.universe())
				g.co.successors(*rf_src[r]).for_each([&](EventId w) { d.fr.insert(r, w); });
		} else {
			for (EventId w = 0; w < n; ++w)
				if (is_write_kind(ev[w].kind) && loc[w] == loc[r])
					d.fr.insert(r, w);
		}
	}

	// fr_pa: the same over mappings and co_pa.
	d.fr_pa = Relation(n);
	for (EventId e = 0; e < n; ++e) {
		if (map[e].kind == MappingSource::Kind::Write) {
			if (map[e].write < g.co_pa.universe())
				g.co_pa.successors(map[e].write).for_each([&](EventId q) { d.fr_pa.insert(e, q); });
		} else if (map[e].kind == MappingSource::Kind::Init && d.mapped_pa[e]) {
			for (EventId q = 0; q < n; ++q)
				if (ev[q].kind == EventKind::PteWrite && ev[q].target == *d.mapped_pa[e])
					d.fr_pa.insert(e, q);
		}
	}

	// fr_va: a data event precedes every PTE write to its VA that is
	// coherence-later than the mapping it used.
	d.fr_va = Relation(n);
	for (EventId e = 0; e < n; ++e) {
		if (!is_data(ev[e].kind) || map[e].kind == MappingSource::Kind::None)
			continue;
		for (EventId q = 0; q < n; ++q) {
			if (ev[q].kind != EventKind::PteWrite || ev[q].va != ev[e].va)
				continue;
			if (map[e].kind == MappingSource::Kind::Init || g.co.contains(map[e].write, q))
				d.fr_va.insert(e, q);
		}
	}

	d.ppo = Relation(n);
	d.gpo_plus.for_each([&](EventId a, EventId b) {
		if (!is_memory(ev[a].kind) || !is_memory(ev[b].kind))
			return;
		if (is_write_kind(ev[a].kind) && is_read_kind(ev[b].kind))
			return;
		d.ppo.insert(a, b);
	});

	d.fence = Relation(n);
	for (EventId f = 0; f < n; ++f) {
		if (ev[f].kind != EventKind::Fence)
			continue;
		auto before = d.gpo_plus.predecessors(f);
		auto after = d.gpo_plus.successors(f);
		before.for_each([&](EventId a) {
			if (!is_memory(ev[a].kind))
				return;
			after.for_each([&](EventId b) {
				if (is_memory(ev[b].kind))
					d.fence.insert(a, b);
			});
		});
	}

	d.rfe = Relation(n);
	g.rf.for_each([&](EventId a, EventId b) {
		if (a < n && b < n && ev[a].thread != ev[b].thread)
			d.rfe.insert(a, b);
	});

	d.com = g.rf | g.co | d.fr;
	d.com.resize(n);

	// ptw_source: e0 invokes a walk whose TLB entry other events use.
	d.ptw_source = Relation(n);
	p.ghost.for_each([&](EventId e0, EventId w) {
		if (w >= n || ev[w].kind != EventKind::PtWalk || w >= g.rf_ptw.universe())
			return;
		g.rf_ptw.successors(w).for_each([&](EventId e1) {
			if (e1 != e0)
				d.ptw_source.insert(e0, e1);
		});
	});

	return d;
}

DerivedRelations derive(const ExecutionGraph &g)
{
	auto violations = validate(g);
	if (!violations.empty())
		throw WellFormednessError(std::move(violations));
	return derive_unchecked(g);
}

const std::vector<std::string_view> &relation_names()
{
	static const std::vector<std::string_view> names = {
		"po", "rf", "co", "rf_ptw", "rf_pa", "co_pa", "ghost", "remap", "rmw",
		"gpo", "gpo_plus", "po_loc", "fr", "fr_pa", "fr_va", "ppo", "fence",
		"rfe", "com", "ptw_source",
	};
	return names;
}

const Relation *lookup_relation(const ExecutionGraph &g, const DerivedRelations &d,
				std::string_view name)
{
	const std::array<std::pair<std::string_view, const Relation *>, 20> table = {{
		{"po", &g.program.po},
		{"rf", &g.rf},
		{"co", &g.co},
		{"rf_ptw", &g.rf_ptw},
		{"rf_pa", &g.rf_pa},
		{"co_pa", &g.co_pa},
		{"ghost", &g.program.ghost},
		{"remap", &g.program.remap},
		{"rmw", &g.program.rmw},
		{"gpo", &d.gpo},
		{"gpo_plus", &d.gpo_plus},
		{"po_loc", &d.po_loc},
		{"fr", &d.fr},
		{"fr_pa", &d.fr_pa},
		{"fr_va", &d.fr_va},
		{"ppo", &d.ppo},
		{"fence", &d.fence},
		{"rfe", &d.rfe},
		{"com", &d.com},
		{"ptw_source", &d.ptw_source},
	}};
	for (const auto &[k, r] : table)
		if (k == name)
			return r;
	return nullptr;
}

} // namespace mtm
