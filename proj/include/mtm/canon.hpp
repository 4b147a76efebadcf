#pragma once

#include "mtm/relax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mtm {

// Text encoding of a program that is equal for two programs iff they are
// isomorphic: same up to thread permutation, VA renaming, PA renaming and
// event reindexing.
std::string canonical_form(const Program &p);

// One representative per canonical form, first-seen order.
std::vector<Program> dedup(const std::vector<Program> &suite);

// The same program with threads, VAs, PAs and event ids permuted. Each
// permutation vector maps old index -> new index and must be a bijection of
// the right size (threads are indexed by their position in p.threads()).
Program permute(const Program &p, const std::vector<std::size_t> &threads, const std::vector<std::size_t> &vas,
		const std::vector<std::size_t> &pas, const std::vector<std::size_t> &events);

struct CompareResult {
	enum class Kind : std::uint8_t { Verbatim, ReducibleTo, NotCovered };
	Kind kind = Kind::NotCovered;
	std::size_t match = 0;                 // suite index
	std::vector<RelaxationUnit> removed;   // ReducibleTo only, units of the test
};

struct CompareOptions {
	// Units above this count: only subsets up to max_subset_size are tried.
	std::size_t exhaustive_units = 12;
	std::size_t max_subset_size = 3;
};

CompareResult compare(const Program &t, const std::vector<Program> &suite, CompareOptions opts = {});

// Reason the test falls outside the space of interesting tests, if it does:
// it has no user-facing write (UserWrite or PteWrite), or (with a model) no execution the model forbids.
std::optional<std::string> screen(const Program &t, const Model *m = nullptr);

} // namespace mtm
