#pragma once

#include "mtm/canon.hpp"
#include "mtm/model.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mtm {

struct SynthConfig {
	Model model = x86t_elt();
	std::string target_axiom;
	std::size_t bound = 4;        // counts every event, ghosts included
	double timeout_seconds = 0;   // 0: no limit
	bool enable_fences = false;
	std::optional<bool> enable_rmw; // default: only when targeting rmw_atomicity
	std::size_t max_threads = 0;  // 0: bound
	std::size_t max_vas = 0;      // 0: bound
	unsigned workers = 0;         // 0: hardware concurrency

	bool rmw_enabled() const { return enable_rmw.value_or(target_axiom == "rmw_atomicity"); }
};

struct SuiteEntry {
	Program program;
	ExecutionGraph witness;
	std::string form; // canonical_form(program)
};

struct SynthResult {
	std::vector<SuiteEntry> suite; // sorted by (size, form)
	bool complete = true;          // false when the timeout hit
	double seconds = 0;
	std::size_t candidates = 0;    // distinct programs examined

	// Members with at most `events` events: the suite a smaller bound yields.
	std::size_t count_up_to(std::size_t events) const;
};

// Throws std::invalid_argument for an unknown target axiom or bound 0.
SynthResult synthesize(const SynthConfig &cfg);

// Every distinct (up to isomorphism) structurally well-formed program in the
// synthesis search space, WF9 included, before any semantic filtering.
// Visitor returns false to stop.
void for_each_candidate(const SynthConfig &cfg, const std::function<bool(const Program &)> &visit);

// The first execution of p (in enumeration order) that violates `target`
// and is minimal under `m`, if any.
std::optional<ExecutionGraph> find_witness(const Program &p, const Model &m, const std::string &target,
					   bool single_co_pa = false);

} // namespace mtm
