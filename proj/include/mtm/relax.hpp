#pragma once

#include "mtm/model.hpp"

#include <string>
#include <vector>

namespace mtm {

// Something the minimality check takes away from an execution.
struct RelaxationUnit {
	enum class Kind : std::uint8_t { RemoveUserEvent, RemoveSpuriousInvlpg, RemoveRmwDependency, RemoveFence };
	Kind kind;
	EventId anchor = 0;          // the user event, Invlpg, fence, or the rmw read
	std::vector<EventId> events; // events deleted, ascending; empty for rmw units
	EventPair rmw_pair{};        // RemoveRmwDependency only

	bool operator==(const RelaxationUnit &) const = default;
};

std::string describe(const RelaxationUnit &u, const std::vector<std::string> &labels);

// One unit per PteWrite / UserRead / UserWrite (with its ghosts, and for a
// PteWrite its remap Invlpgs), per spurious Invlpg, per rmw pair, per fence.
std::vector<RelaxationUnit> relaxation_units(const Program &p);
inline std::vector<RelaxationUnit> relaxation_units(const ExecutionGraph &g)
{
	return relaxation_units(g.program);
}

// Events kept and rmw pairs dropped by removing a set of units.
struct Removal {
	EventSet keep;
	Relation rmw_dropped;
};
Removal removal_of(const Program &p, const std::vector<const RelaxationUnit *> &units);

// Restriction to the kept events, renumbered densely in id order. Relations
// touching a removed event disappear; so an event whose rf or mapping source
// is gone reads the initial value or is left unmapped respectively.
Program restrict_program(const Program &p, const Removal &r);
ExecutionGraph restrict_graph(const ExecutionGraph &g, const Removal &r);

// True iff every unit's restriction satisfies every axiom of m.
bool is_minimal(const ExecutionGraph &g, const Model &m);

// Precomputed per program, for checking many executions of one program.
class MinimalityChecker {
public:
	MinimalityChecker(const Program &p, const Model &m);
	bool minimal(const ExecutionGraph &g) const;

private:
	const Model &m_;
	std::vector<Removal> removals_;
	std::vector<Program> programs_;
};

} // namespace mtm
