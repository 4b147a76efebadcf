#pragma once

#include "mtm/graph.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace mtm {

// Effective location: a physical address for data events, the PTE of the VA
// for translation events, nothing for Invlpg / Fence / unmapped events.
struct EffLoc {
	enum class Space : std::uint8_t { None, Phys, Pte } space = Space::None;
	std::uint32_t id = 0;

	static EffLoc phys(Pa p) { return {Space::Phys, p.id}; }
	static EffLoc pte(Va v) { return {Space::Pte, v.id}; }
	bool none() const { return space == Space::None; }
	bool operator==(const EffLoc &) const = default;
};

struct DerivedRelations {
	// po with each ghost placed in its invoker's slot: ordered like the
	// invoker against other user events, unordered against the invoker and
	// its sibling ghost.
	Relation gpo;
	Relation gpo_plus;
	Relation po_loc;
	Relation fr;
	Relation fr_pa;
	Relation fr_va;
	Relation ppo;
	Relation fence;
	Relation rfe;
	Relation com;
	Relation ptw_source;
	std::vector<EffLoc> effective_loc;
	// PA of the mapping each data event / walk uses, if mapped.
	std::vector<std::optional<Pa>> mapped_pa;

	std::optional<Pa> effective_pa(EventId e) const;
};

// Derived relations of a graph. Throws WellFormednessError on ill-formed input.
DerivedRelations derive(const ExecutionGraph &g);

// Same, without validation. Used on restrictions, which need not be
// well-formed.
DerivedRelations derive_unchecked(const ExecutionGraph &g);

// Looks a relation up by name among base and derived relations; nullptr if
// the name is unknown.
const Relation *lookup_relation(const ExecutionGraph &g, const DerivedRelations &d,
				std::string_view name);

// All names lookup_relation resolves.
const std::vector<std::string_view> &relation_names();

} // namespace mtm
