#pragma once

#include "mtm/graph.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtm {

enum class WfRule : std::uint8_t { WF1 = 1, WF2, WF3, WF4, WF5, WF6, WF7, WF8, WF9, WF10, WF11, WF12, WF13 };

std::string rule_name(WfRule r);

struct WfViolation {
	WfRule rule;
	std::vector<EventId> events;
	std::string message;

	auto operator<=>(const WfViolation &) const = default;
};

class WellFormednessError : public std::runtime_error {
public:
	explicit WellFormednessError(std::vector<WfViolation> v);
	const std::vector<WfViolation> &violations() const { return violations_; }

private:
	std::vector<WfViolation> violations_;
};

struct ValidateOptions {
	// Also reject spurious Invlpgs that no later access on their thread can
	// observe. Only synthesis applies this.
	bool useless_invlpg_filter = false;
};

// Sorted, deduplicated list; empty iff the execution is well-formed.
std::vector<WfViolation> validate(const ExecutionGraph &g, ValidateOptions opts = {});

// Structural rules only (those that do not depend on an execution).
std::vector<WfViolation> validate_program(const Program &p, ValidateOptions opts = {});

// The (VA, PA) mapping a data event or walk uses. Throws std::invalid_argument
// for unknown ids, other event kinds, or unmapped events.
std::pair<Va, Pa> effective_mapping(const ExecutionGraph &g, EventId e);

// Spurious Invlpgs with no later same-VA data access on their thread.
std::vector<EventId> useless_invlpgs(const Program &p);

} // namespace mtm
