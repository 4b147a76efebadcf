#include "mtm/suite_io.hpp"

#include "mtm/canon.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mtm {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path &path, const std::string &text)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw std::runtime_error("cannot write " + path.string());
	out << text;
}

std::string numbered(const std::string &prefix, std::size_t i, std::size_t total)
{
	auto digits = std::max<std::size_t>(3, std::to_string(total).size());
	auto n = std::to_string(i + 1);
	return prefix + "_" + std::string(digits - n.size(), '0') + n;
}

void clear_old_members(const fs::path &dir)
{
	for (const auto &entry : fs::directory_iterator(dir))
		if (entry.is_regular_file() && entry.path().extension() == ".elt")
			fs::remove(entry.path());
}

} // namespace

void write_documents(const fs::path &dir, const std::string &prefix, const std::vector<EltDocument> &docs)
{
	fs::create_directories(dir);
	clear_old_members(dir);
	std::ostringstream index;
	index << "file,events,threads,form\n";
	for (std::size_t i = 0; i < docs.size(); ++i) {
		const auto &d = docs[i];
		auto name = numbered(prefix, i, docs.size());
		auto file = name + ".elt";
		write_text(dir / file, print_elt(EltDocument{name, d.program, d.exec, d.expect, {}}));
		index << file << ',' << d.program.size() << ',' << d.program.threads().size() << ','
		      << canonical_form(d.program) << '\n';
	}
	write_text(dir / "index.csv", index.str());
}

void write_suite(const fs::path &dir, const SynthConfig &cfg, const SynthResult &res)
{
	std::vector<EltDocument> docs;
	Expectation expect{true, {cfg.target_axiom}};
	for (const auto &e : res.suite)
		docs.push_back({"", e.program, e.witness, expect, {}});
	write_documents(dir, cfg.target_axiom + "_b" + std::to_string(cfg.bound), docs);
	append_stats(dir / "stats.csv", {cfg.target_axiom, cfg.bound, res.suite.size(), res.seconds, res.complete});
	fs::remove(dir / "COMPLETE");
	fs::remove(dir / "PARTIAL");
	write_text(dir / (res.complete ? "COMPLETE" : "PARTIAL"),
		   cfg.target_axiom + " bound " + std::to_string(cfg.bound) + "\n");
}

std::vector<SuiteFile> read_suite(const fs::path &dir, ParseOptions opts)
{
	if (!fs::is_directory(dir))
		throw std::runtime_error(dir.string() + " is not a directory");
	std::vector<fs::path> files;
	for (const auto &entry : fs::directory_iterator(dir))
		if (entry.is_regular_file() && entry.path().extension() == ".elt")
			files.push_back(entry.path());
	std::sort(files.begin(), files.end());
	std::vector<SuiteFile> out;
	for (const auto &f : files) {
		try {
			out.push_back({f.filename().string(), read_elt_file(f.string(), opts)});
		} catch (const std::exception &e) {
			throw std::runtime_error(f.filename().string() + ": " + e.what());
		}
	}
	return out;
}

void append_stats(const fs::path &csv, const StatsRow &row)
{
	bool fresh = !fs::exists(csv) || fs::file_size(csv) == 0;
	std::ofstream out(csv, std::ios::app);
	if (!out)
		throw std::runtime_error("cannot write " + csv.string());
	if (fresh)
		out << "axiom,bound,count,runtime_seconds,status\n";
	char secs[32];
	std::snprintf(secs, sizeof secs, "%.3f", row.seconds);
	out << row.axiom << ',' << row.bound << ',' << row.count << ',' << secs << ','
	    << (row.complete ? "complete" : "partial") << '\n';
}

std::vector<StatsRow> read_stats(const fs::path &csv)
{
	std::ifstream in(csv);
	if (!in)
		throw std::runtime_error("cannot read " + csv.string());
	std::vector<StatsRow> rows;
	std::string line;
	std::getline(in, line); // header
	while (std::getline(in, line)) {
		if (line.empty())
			continue;
		std::vector<std::string> f;
		std::stringstream ss(line);
		for (std::string cell; std::getline(ss, cell, ',');)
			f.push_back(cell);
		if (f.size() < 4)
			throw std::runtime_error("malformed stats row: " + line);
		StatsRow r;
		r.axiom = f[0];
		r.bound = std::stoul(f[1]);
		r.count = std::stoul(f[2]);
		r.seconds = std::stod(f[3]);
		r.complete = f.size() < 5 || f[4] != "partial";
		rows.push_back(r);
	}
	return rows;
}

} // namespace mtm
