#include "mtm/graph.hpp"

#include <algorithm>

namespace mtm {

std::string_view kind_name(EventKind k)
{
	switch (k) {
	case EventKind::UserRead: return "UserRead";
	case EventKind::UserWrite: return "UserWrite";
	case EventKind::PteWrite: return "PteWrite";
	case EventKind::Invlpg: return "Invlpg";
	case EventKind::Fence: return "Fence";
	case EventKind::PtWalk: return "PtWalk";
	case EventKind::DirtyBitWrite: return "DirtyBitWrite";
	}
	return "?";
}

std::vector<EventId> Program::thread_events(ThreadId t) const
{
	std::vector<std::pair<std::size_t, EventId>> keyed;
	for (EventId e = 0; e < events.size(); ++e)
		if (events[e].thread == t && !is_ghost(events[e].kind))
			keyed.emplace_back(po.predecessors(e).size(), e);
	std::sort(keyed.begin(), keyed.end());
	std::vector<EventId> out;
	for (auto &[_, e] : keyed)
		out.push_back(e);
	return out;
}

std::vector<ThreadId> Program::threads() const
{
	std::vector<ThreadId> out;
	for (const auto &ev : events)
		out.push_back(ev.thread);
	std::sort(out.begin(), out.end());
	out.erase(std::unique(out.begin(), out.end()), out.end());
	return out;
}

std::optional<EventId> Program::invoker(EventId g) const
{
	for (EventId e = 0; e < ghost.universe(); ++e)
		if (ghost.contains(e, g))
			return e;
	return std::nullopt;
}

namespace {

std::optional<EventId> ghost_of_kind(const Program &p, EventId inv, EventKind k)
{
	std::optional<EventId> found;
	if (inv >= p.ghost.universe())
		return found;
	p.ghost.successors(inv).for_each([&](EventId g) {
		if (!found && g < p.events.size() && p.events[g].kind == k)
			found = g;
	});
	return found;
}

} // namespace

std::optional<EventId> Program::walk_of(EventId e) const
{
	return ghost_of_kind(*this, e, EventKind::PtWalk);
}

std::optional<EventId> Program::dirty_bit_of(EventId e) const
{
	return ghost_of_kind(*this, e, EventKind::DirtyBitWrite);
}

MappingSource ExecutionGraph::mapping(EventId e) const
{
	if (rf_pa_init.contains(e))
		return MappingSource::init();
	for (EventId p = 0; p < rf_pa.universe(); ++p)
		if (rf_pa.contains(p, e))
			return MappingSource::from(p);
	return {};
}

std::optional<EventId> ExecutionGraph::rf_source(EventId r) const
{
	for (EventId w = 0; w < rf.universe(); ++w)
		if (rf.contains(w, r))
			return w;
	return std::nullopt;
}

std::optional<EventId> ExecutionGraph::walk_source(EventId e) const
{
	for (EventId w = 0; w < rf_ptw.universe(); ++w)
		if (rf_ptw.contains(w, e))
			return w;
	return std::nullopt;
}

} // namespace mtm
