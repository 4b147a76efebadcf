#pragma once
// Test-side oracles. Nothing here reuses the enumeration or generation code
// under test; validation (validate, validate_program) is the shared contract.

#include "mtm/canon.hpp"
#include "mtm/elt_format.hpp"
#include "mtm/model.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace mtm::testing {

std::string data_path(const std::string &rel);
EltDocument load_data(const std::string &rel);

// Order-independent text key of an execution's relations.
std::string exec_key(const ExecutionGraph &g);

// Every assignment of rf, co, rf_ptw, rf_pa and co_pa (co and co_pa drawn
// from total orders of all writes / PTE writes, cut down to matching
// locations) that passes validate(). Small programs only.
std::set<std::string> brute_force_executions(const Program &p);

// Generate-and-filter synthesis: raw per-thread token strings without
// symmetry breaking, filtered structurally, then every execution checked
// with check() and is_minimal(). Returns canonical forms per axiom.
struct NaiveOptions {
	std::size_t bound = 4;
	std::uint32_t vas = 3;  // VA ids drawn from [0, vas)
	std::uint32_t pas = 5;  // PTE targets drawn from [0, pas), init v -> v
	bool rmw = false;
};
std::map<std::string, std::set<std::string>> naive_suites(const NaiveOptions &opts);

// A random relabelling: threads, VAs, PAs and event ids permuted.
Program random_isomorph(const Program &p, std::mt19937 &rng);

// Program built from a elt text, for hand-written fixtures.
Program parse_program(const std::string &elt_text);

} // namespace mtm::testing
