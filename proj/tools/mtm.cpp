// mtm: check, enumerate, synthesize, deduplicate and compare ELTs.

#include "mtm/canon.hpp"
#include "mtm/elt_format.hpp"
#include "mtm/oracle.hpp"
#include "mtm/suite_io.hpp"
#include "mtm/synth.hpp"
#include "mtm/wellformed.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <unordered_map>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace mtm;

namespace {

constexpr int exit_error = 2;
constexpr int exit_partial = 3;

struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

Model model_named(const std::string &name)
{
	if (name == "x86t_elt")
		return x86t_elt();
	throw UsageError("unknown model '" + name + "' (available: x86t_elt)");
}

std::string cycle_text(const std::vector<EventId> &cyc, const std::vector<std::string> &labels)
{
	std::string s;
	for (std::size_t i = 0; i < cyc.size(); ++i)
		s += (i ? " -> " : "") + (cyc[i] < labels.size() ? labels[cyc[i]] : std::to_string(cyc[i]));
	return s;
}

void print_wf(const WellFormednessError &e, const std::vector<std::string> &labels)
{
	for (const auto &v : e.violations()) {
		std::cerr << rule_name(v.rule) << ": " << v.message;
		if (!v.events.empty()) {
			std::cerr << " (";
			for (std::size_t i = 0; i < v.events.size(); ++i)
				std::cerr << (i ? " " : "")
					  << (v.events[i] < labels.size() ? labels[v.events[i]] : std::to_string(v.events[i]));
			std::cerr << ")";
		}
		std::cerr << "\n";
	}
}

// Parse without validation first so WF errors can name source labels.
EltDocument load(const std::string &path)
{
	auto doc = read_elt_file(path, {false});
	auto v = doc.exec ? validate(*doc.exec) : validate_program(doc.program);
	if (!v.empty()) {
		WellFormednessError e(std::move(v));
		std::cerr << path << ": not well-formed\n";
		print_wf(e, doc.labels);
		throw e;
	}
	return doc;
}

int cmd_check(const std::string &file, const std::string &model_name)
{
	auto m = model_named(model_name);
	auto doc = load(file);
	if (!doc.exec) {
		std::cerr << file << ": no exec block to check (try `mtm oracle`)\n";
		return exit_error;
	}
	auto v = check(*doc.exec, m);
	std::cout << doc.name << ": " << (v.consistent ? "consistent" : "forbidden") << "\n";
	for (const auto &x : v.violated)
		std::cout << "  " << x.axiom << ": " << cycle_text(x.witness, doc.labels) << "\n";
	if (doc.expect) {
		bool met = doc.expect->forbidden == !v.consistent;
		for (const auto &a : doc.expect->axioms)
			met = met && v.violates(a);
		std::cout << "  expectation " << (met ? "met" : "NOT met") << "\n";
		if (!met)
			return 1;
	}
	return 0;
}

int cmd_oracle(const std::string &file, const std::string &model_name, std::size_t bound)
{
	auto m = model_named(model_name);
	auto doc = load(file);
	EnumerateOptions opts;
	opts.bound = bound;
	auto c = classify(doc.program, m, opts);
	std::cout << doc.name << ": " << c.permitted + c.forbidden << " executions, " << c.permitted
		  << " permitted, " << c.forbidden << " forbidden\n";
	for (const auto &ax : m.axioms) {
		auto it = c.per_axiom.find(ax.name);
		std::cout << "  " << ax.name << ": " << (it == c.per_axiom.end() ? 0 : it->second) << "\n";
	}
	return 0;
}

struct SynthArgs {
	std::string model = "x86t_elt", axiom, out;
	std::size_t bound = 0, max_threads = 0, max_vas = 0;
	double timeout = 0;
	bool fences = false, rmw = false, no_rmw = false, strict = false;
	unsigned workers = 0;
};

int cmd_synth(const SynthArgs &a)
{
	SynthConfig cfg;
	cfg.model = model_named(a.model);
	cfg.target_axiom = a.axiom;
	cfg.bound = a.bound;
	cfg.timeout_seconds = a.timeout;
	cfg.enable_fences = a.fences;
	if (a.rmw)
		cfg.enable_rmw = true;
	if (a.no_rmw)
		cfg.enable_rmw = false;
	cfg.max_threads = a.max_threads;
	cfg.max_vas = a.max_vas;
	cfg.workers = a.workers;
	SynthResult res;
	try {
		res = synthesize(cfg);
	} catch (const std::invalid_argument &e) {
		throw UsageError(e.what());
	}
	write_suite(a.out, cfg, res);
	std::printf("%s bound %zu: %zu ELTs from %zu candidates in %.3f s%s\n", a.axiom.c_str(), a.bound,
		    res.suite.size(), res.candidates, res.seconds, res.complete ? "" : " (PARTIAL: timeout)");
	return !res.complete && a.strict ? exit_partial : 0;
}

int cmd_dedup(const std::vector<std::string> &dirs, const std::string &out)
{
	for (const auto &d : dirs)
		if (fs::exists(out) && fs::equivalent(out, d))
			throw UsageError("--out must differ from the inputs");
	std::vector<EltDocument> docs;
	for (const auto &d : dirs)
		for (auto &f : read_suite(d))
			docs.push_back(std::move(f.doc));
	std::unordered_map<std::string, bool> seen;
	std::vector<EltDocument> kept;
	for (auto &d : docs)
		if (seen.emplace(canonical_form(d.program), true).second)
			kept.push_back(std::move(d));
	write_documents(out, "elt", kept);
	std::cout << docs.size() << " ELTs in, " << kept.size() << " unique\n";
	return 0;
}

std::string csv_cell(const std::string &s)
{
	if (s.find_first_of(",\"\n") == std::string::npos)
		return s;
	std::string q = "\"";
	for (char c : s)
		q += c == '"' ? std::string("\"\"") : std::string(1, c);
	return q + "\"";
}

int cmd_compare(const std::string &suite_dir, const std::string &tests_dir, const std::string &out,
		const std::string &screen_model)
{
	auto suite = read_suite(suite_dir);
	auto tests = read_suite(tests_dir);
	std::optional<Model> m;
	if (!screen_model.empty())
		m = model_named(screen_model);
	std::vector<Program> programs;
	for (const auto &s : suite)
		programs.push_back(s.doc.program);

	std::ofstream csv(out);
	if (!csv)
		throw std::runtime_error("cannot write " + out);
	csv << "test,category,match,removed,note\n";
	std::map<std::string, std::size_t> tally;
	for (const auto &t : tests) {
		std::string category, match, removed, note;
		if (auto why = screen(t.doc.program, m ? &*m : nullptr)) {
			category = "excluded";
			note = *why;
		} else {
			auto r = compare(t.doc.program, programs);
			switch (r.kind) {
			case CompareResult::Kind::Verbatim:
				category = "verbatim";
				match = suite[r.match].file;
				break;
			case CompareResult::Kind::ReducibleTo:
				category = "reducible";
				match = suite[r.match].file;
				for (std::size_t i = 0; i < r.removed.size(); ++i)
					removed += (i ? " " : "") + describe(r.removed[i], t.doc.labels);
				break;
			case CompareResult::Kind::NotCovered:
				category = "not-covered";
				break;
			}
		}
		++tally[category];
		csv << csv_cell(t.file) << ',' << category << ',' << csv_cell(match) << ',' << csv_cell(removed) << ','
		    << csv_cell(note) << '\n';
		std::cout << t.file << ": " << category;
		if (!match.empty())
			std::cout << " " << match;
		if (!removed.empty())
			std::cout << " removing " << removed;
		if (!note.empty())
			std::cout << " (" << note << ")";
		std::cout << "\n";
	}
	for (const auto &[k, n] : tally)
		std::cout << k << ": " << n << "\n";
	return 0;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Memory transistency model toolkit: check, enumerate and synthesize enhanced litmus tests"};
	app.require_subcommand(1);

	std::string file, model = "x86t_elt";
	auto *check_cmd = app.add_subcommand("check", "Evaluate the execution in an ELT file against a model");
	check_cmd->add_option("file", file, "ELT file")->required();
	check_cmd->add_option("--model", model, "Model name");

	std::size_t oracle_bound = default_oracle_bound;
	auto *oracle_cmd = app.add_subcommand("oracle", "Enumerate all executions of an ELT program");
	oracle_cmd->add_option("file", file, "ELT file")->required();
	oracle_cmd->add_option("--model", model, "Model name");
	oracle_cmd->add_option("--bound", oracle_bound, "Refuse programs with more events than this");

	SynthArgs sa;
	auto *synth_cmd = app.add_subcommand("synth", "Synthesize the minimal ELTs violating one axiom");
	synth_cmd->add_option("--model", sa.model, "Model name");
	synth_cmd->add_option("--axiom", sa.axiom, "Axiom to violate")->required();
	synth_cmd->add_option("--bound", sa.bound, "Maximum events per ELT, ghosts included")->required();
	synth_cmd->add_option("--out", sa.out, "Output directory")->required();
	synth_cmd->add_option("--timeout", sa.timeout, "Wall-clock limit in seconds (0: none)");
	synth_cmd->add_flag("--fences", sa.fences, "Allow mfence instructions");
	auto *rmw_flag = synth_cmd->add_flag("--rmw", sa.rmw, "Allow RMW pairs (default: only for rmw_atomicity)");
	synth_cmd->add_flag("--no-rmw", sa.no_rmw, "Disallow RMW pairs")->excludes(rmw_flag);
	synth_cmd->add_option("--max-threads", sa.max_threads, "Thread cap (0: bound)");
	synth_cmd->add_option("--max-vas", sa.max_vas, "VA cap (0: bound)");
	synth_cmd->add_option("--workers", sa.workers, "Worker threads (0: hardware concurrency)");
	synth_cmd->add_flag("--strict", sa.strict, "Exit 3 when the timeout cut the search short");

	std::vector<std::string> dedup_dirs;
	std::string dedup_out;
	auto *dedup_cmd = app.add_subcommand("dedup", "Merge suites keeping one ELT per isomorphism class");
	dedup_cmd->add_option("dirs", dedup_dirs, "Suite directories")->required();
	dedup_cmd->add_option("--out", dedup_out, "Output directory")->required();

	std::string suite_dir, tests_dir, report, screen_model;
	auto *compare_cmd = app.add_subcommand("compare", "Classify external ELTs against a synthesized suite");
	compare_cmd->add_option("--suite", suite_dir, "Synthesized suite directory")->required();
	compare_cmd->add_option("--tests", tests_dir, "Directory of ELTs to classify")->required();
	compare_cmd->add_option("--out", report, "CSV report path")->required();
	compare_cmd->add_option("--screen-model", screen_model,
				"Also exclude tests without any forbidden execution under this model");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return e.get_exit_code() == 0 ? 0 : exit_error;
	}

	try {
		if (*check_cmd)
			return cmd_check(file, model);
		if (*oracle_cmd)
			return cmd_oracle(file, model, oracle_bound);
		if (*synth_cmd)
			return cmd_synth(sa);
		if (*dedup_cmd)
			return cmd_dedup(dedup_dirs, dedup_out);
		if (*compare_cmd)
			return cmd_compare(suite_dir, tests_dir, report, screen_model);
	} catch (const WellFormednessError &) {
		return exit_error; // already reported with labels
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << "\n";
		return exit_error;
	}
	return exit_error;
}
