#pragma once

#include "mtm/model.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtm {

inline constexpr std::size_t default_oracle_bound = 10;

class BoundExceeded : public std::runtime_error {
public:
	BoundExceeded(std::size_t size, std::size_t bound)
		: std::runtime_error("program has " + std::to_string(size) + " events, bound is " +
				     std::to_string(bound))
	{}
};

struct EnumerateOptions {
	std::size_t bound = default_oracle_bound;
	// Emit only one co_pa order per PA. Safe when the model ignores co_pa
	// and fr_pa; the oracle itself never sets this.
	bool single_co_pa = false;
};

// Return false to stop the enumeration.
using ExecutionVisitor = std::function<bool(const ExecutionGraph &)>;

// Every well-formed execution of `p`, each once, in a fixed order. Returns
// the number emitted. Throws BoundExceeded, or WellFormednessError if `p`
// breaks a structural rule.
std::size_t enumerate_executions(const Program &p, const ExecutionVisitor &visit,
				 EnumerateOptions opts = {});

std::vector<ExecutionGraph> all_executions(const Program &p, EnumerateOptions opts = {});

struct Classification {
	std::size_t permitted = 0;
	std::size_t forbidden = 0;
	std::map<std::string, std::size_t> per_axiom; // forbidden executions violating each axiom
	std::map<std::string, Violation> witness;     // first witness seen per axiom
	std::optional<ExecutionGraph> first_forbidden;
	std::optional<ExecutionGraph> first_permitted;
};

Classification classify(const Program &p, const Model &m, EnumerateOptions opts = {});

} // namespace mtm
