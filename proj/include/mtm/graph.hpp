#pragma once

#include "mtm/relation.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtm {

using ThreadId = std::uint32_t;

struct Va {
	std::uint32_t id = 0;
	auto operator<=>(const Va &) const = default;
};

struct Pa {
	std::uint32_t id = 0;
	auto operator<=>(const Pa &) const = default;
};

enum class EventKind : std::uint8_t {
	UserRead,
	UserWrite,
	PteWrite,
	Invlpg,
	Fence,
	PtWalk,
	DirtyBitWrite,
};

std::string_view kind_name(EventKind k);

constexpr bool is_ghost(EventKind k) { return k == EventKind::PtWalk || k == EventKind::DirtyBitWrite; }
constexpr bool is_data(EventKind k) { return k == EventKind::UserRead || k == EventKind::UserWrite; }
// Events whose location is the page-table entry of their VA.
constexpr bool is_translation(EventKind k)
{
	return k == EventKind::PteWrite || k == EventKind::PtWalk || k == EventKind::DirtyBitWrite;
}
constexpr bool is_memory(EventKind k) { return is_data(k) || is_translation(k); }
constexpr bool is_read_kind(EventKind k) { return k == EventKind::UserRead || k == EventKind::PtWalk; }
constexpr bool is_write_kind(EventKind k)
{
	return k == EventKind::UserWrite || k == EventKind::PteWrite || k == EventKind::DirtyBitWrite;
}

struct Event {
	EventKind kind = EventKind::UserRead;
	ThreadId thread = 0;
	Va va;     // unused for Fence
	Pa target; // PteWrite only: the PA the new mapping points to

	bool operator==(const Event &) const = default;
};

// A litmus program: events plus the program-level relations. Event ids are
// indices into `events`.
struct Program {
	std::vector<Event> events;
	Relation po;    // strict total order per thread, user-facing events only
	Relation ghost; // invoker -> PtWalk / DirtyBitWrite
	Relation remap; // PteWrite -> Invlpg
	Relation rmw;   // UserRead -> UserWrite
	std::vector<Pa> init; // initial mapping, indexed by Va::id
	std::vector<std::string> va_names;
	std::vector<std::string> pa_names;

	std::size_t size() const { return events.size(); }
	const Event &operator[](EventId e) const { return events[e]; }

	// Non-ghost events of `t` in program order.
	std::vector<EventId> thread_events(ThreadId t) const;
	std::vector<ThreadId> threads() const;
	std::optional<EventId> invoker(EventId ghost_event) const;
	std::optional<EventId> walk_of(EventId invoker_event) const;
	std::optional<EventId> dirty_bit_of(EventId invoker_event) const;

	bool operator==(const Program &) const = default;
};

// Where an event's address mapping came from.
struct MappingSource {
	enum class Kind : std::uint8_t { None, Init, Write } kind = Kind::None;
	EventId write = 0;

	static MappingSource init() { return {Kind::Init, 0}; }
	static MappingSource from(EventId p) { return {Kind::Write, p}; }
	bool operator==(const MappingSource &) const = default;
};

struct ExecutionGraph {
	Program program;
	Relation rf;     // write -> read; reads without a source read the initial state
	Relation co;     // transitive, per location
	Relation rf_ptw; // PtWalk -> data event it translates
	Relation rf_pa;  // PteWrite -> data event / PtWalk using that mapping
	Relation co_pa;  // transitive, per target PA
	EventSet rf_pa_init; // events whose mapping is the initial one

	std::size_t size() const { return program.size(); }
	const Event &operator[](EventId e) const { return program.events[e]; }

	MappingSource mapping(EventId e) const;
	std::optional<EventId> rf_source(EventId read) const;
	std::optional<EventId> walk_source(EventId data_event) const;

	bool operator==(const ExecutionGraph &) const = default;
};

} // namespace mtm
