#pragma once

#include "mtm/elt_format.hpp"
#include "mtm/synth.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mtm {

struct SuiteFile {
	std::string file; // name inside the suite directory
	EltDocument doc;
};

// One .elt per member (program, witness execution, expectation), an index.csv,
// an appended stats.csv row and a COMPLETE or PARTIAL marker.
void write_suite(const std::filesystem::path &dir, const SynthConfig &cfg, const SynthResult &res);

// Writes documents as numbered .elt files plus index.csv; no stats, no marker.
void write_documents(const std::filesystem::path &dir, const std::string &prefix,
		     const std::vector<EltDocument> &docs);

// Every .elt file in dir, sorted by file name. Parse and well-formedness
// errors are rethrown as runtime_error with the file name prepended.
std::vector<SuiteFile> read_suite(const std::filesystem::path &dir, ParseOptions opts = {});

struct StatsRow {
	std::string axiom;
	std::size_t bound = 0;
	std::size_t count = 0;
	double seconds = 0;
	bool complete = true;
};

// Appends, writing the header first when the file is new.
void append_stats(const std::filesystem::path &csv, const StatsRow &row);
std::vector<StatsRow> read_stats(const std::filesystem::path &csv);

} // namespace mtm
