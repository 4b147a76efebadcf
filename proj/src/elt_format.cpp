#include "mtm/elt_format.hpp"

#include "mtm/wellformed.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace mtm {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string &msg)
	: std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
	  line_(line), column_(column)
{}

std::string default_va_name(std::size_t i)
{
	static const char *names[] = {"x", "y", "u", "w", "s", "t"};
	if (i < 6)
		return names[i];
	return "v" + std::to_string(i);
}

std::string default_pa_name(std::size_t i)
{
	if (i < 26)
		return std::string(1, static_cast<char>('a' + i));
	return "p" + std::to_string(i);
}

namespace {

struct Token {
	std::string text;
	std::size_t col; // 1-based
};

std::vector<Token> tokenize(std::string_view line)
{
	std::vector<Token> out;
	std::size_t i = 0;
	while (i < line.size()) {
		if (line[i] == '#')
			break;
		if (std::isspace(static_cast<unsigned char>(line[i]))) {
			++i;
			continue;
		}
		std::size_t j = i;
		while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != '#')
			++j;
		out.push_back({std::string(line.substr(i, j - i)), i + 1});
		i = j;
	}
	return out;
}

bool is_ident(const std::string &s)
{
	if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
		return false;
	return std::all_of(s.begin(), s.end(), [](char c) {
		return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
	});
}

struct Ref {
	std::string label;
	std::size_t line, col;
};

struct PendingPair {
	std::string rel;
	Ref a, b;
};

class Parser {
public:
	explicit Parser(std::string_view text) : text_(text) {}
	EltDocument run(ParseOptions opts);

private:
	[[noreturn]] void fail(const Token &t, const std::string &msg) { throw ParseError(line_, t.col, msg); }
	[[noreturn]] void fail_at(std::size_t col, const std::string &msg) { throw ParseError(line_, col, msg); }

	void expect_count(const std::vector<Token> &t, std::size_t n, const std::string &form)
	{
		if (t.size() != n)
			fail_at(t.size() > n ? t[n].col : t.back().col + t.back().text.size(),
				"expected '" + form + "'");
	}

	std::uint32_t va(const Token &t);
	std::uint32_t pa(const Token &t);
	void instruction(const std::vector<Token> &t);
	void exec_line(const std::vector<Token> &t);
	EventId resolve(const Ref &r);

	std::string_view text_;
	std::size_t line_ = 0;
	EltDocument doc_;
	std::map<std::string, std::uint32_t> vas_, pas_;
	std::vector<std::string> va_names_, pa_names_;
	std::map<std::uint32_t, std::uint32_t> init_;
	std::map<std::string, EventId> labels_;
	std::vector<std::size_t> label_line_;
	std::optional<ThreadId> thread_;
	std::vector<ThreadId> seen_threads_;
	std::optional<EventId> last_user_;
	std::vector<PendingPair> pending_;
	std::vector<std::pair<std::optional<Ref>, Ref>> rf_pa_; // nullopt source = init
	bool in_exec_ = false;
};

std::uint32_t Parser::va(const Token &t)
{
	if (!is_ident(t.text))
		fail(t, "bad VA name '" + t.text + "'");
	auto [it, fresh] = vas_.emplace(t.text, static_cast<std::uint32_t>(va_names_.size()));
	if (fresh)
		va_names_.push_back(t.text);
	return it->second;
}

std::uint32_t Parser::pa(const Token &t)
{
	if (!is_ident(t.text))
		fail(t, "bad PA name '" + t.text + "'");
	auto [it, fresh] = pas_.emplace(t.text, static_cast<std::uint32_t>(pa_names_.size()));
	if (fresh)
		pa_names_.push_back(t.text);
	return it->second;
}

void Parser::instruction(const std::vector<Token> &t)
{
	const auto &lab = t[0].text;
	std::string name = lab.substr(0, lab.size() - 1);
	if (!is_ident(name))
		fail(t[0], "bad label '" + name + "'");
	if (labels_.count(name))
		fail(t[0], "duplicate label '" + name + "'");
	if (t.size() < 2)
		fail_at(t[0].col + lab.size(), "missing instruction after label");

	auto &p = doc_.program;
	Event e;
	e.thread = *thread_;
	const auto &op = t[1].text;
	bool is_ghost_line = false;
	EventId parent = 0;
	if (op == "R" || op == "W" || op == "invlpg") {
		expect_count(t, 3, lab + " " + op + " <va>");
		e.kind = op == "R" ? EventKind::UserRead : op == "W" ? EventKind::UserWrite : EventKind::Invlpg;
		e.va = Va{va(t[2])};
	} else if (op == "Wpte") {
		expect_count(t, 5, lab + " Wpte <va> -> <pa>");
		if (t[3].text != "->")
			fail(t[3], "expected '->'");
		e.kind = EventKind::PteWrite;
		e.va = Va{va(t[2])};
		e.target = Pa{pa(t[4])};
	} else if (op == "mfence") {
		expect_count(t, 2, lab + " mfence");
		e.kind = EventKind::Fence;
	} else if (op == "ghost") {
		expect_count(t, 4, lab + " ghost (db|ptw) <parent>");
		if (t[2].text != "db" && t[2].text != "ptw")
			fail(t[2], "ghost kind must be db or ptw");
		auto it = labels_.find(t[3].text);
		if (it == labels_.end())
			fail(t[3], "undefined label '" + t[3].text + "'");
		parent = it->second;
		if (!last_user_ || *last_user_ != parent)
			fail(t[3], "ghost line must directly follow its parent");
		const auto &pe = p.events[parent];
		if (!is_data(pe.kind))
			fail(t[3], "only R and W invoke ghosts");
		e.kind = t[2].text == "db" ? EventKind::DirtyBitWrite : EventKind::PtWalk;
		if (e.kind == EventKind::DirtyBitWrite && p.walk_of(parent))
			fail(t[2], "db must precede ptw");
		e.va = pe.va;
		is_ghost_line = true;
	} else {
		fail(t[1], "unknown instruction '" + op + "'");
	}

	auto id = static_cast<EventId>(p.events.size());
	p.events.push_back(e);
	labels_[name] = id;
	doc_.labels.push_back(name);
	if (is_ghost_line) {
		p.ghost.insert(parent, id);
		return;
	}
	for (EventId prev = 0; prev < id; ++prev)
		if (p.events[prev].thread == e.thread && !is_ghost(p.events[prev].kind))
			p.po.insert(prev, id);
	last_user_ = id;
}

void Parser::exec_line(const std::vector<Token> &t)
{
	const auto &op = t[0].text;
	if (op == "rf" || op == "co" || op == "co_pa" || op == "rf_ptw" || op == "remap") {
		expect_count(t, 3, op + " <label> <label>");
		pending_.push_back({op, {t[1].text, line_, t[1].col}, {t[2].text, line_, t[2].col}});
	} else if (op == "rf_pa") {
		expect_count(t, 3, "rf_pa (init|<label>) <label>");
		std::optional<Ref> src;
		if (t[1].text != "init")
			src = Ref{t[1].text, line_, t[1].col};
		rf_pa_.emplace_back(src, Ref{t[2].text, line_, t[2].col});
	} else {
		fail(t[0], "unknown exec relation '" + op + "'");
	}
}

EventId Parser::resolve(const Ref &r)
{
	auto it = labels_.find(r.label);
	if (it == labels_.end())
		throw ParseError(r.line, r.col, "undefined label '" + r.label + "'");
	return it->second;
}

EltDocument Parser::run(ParseOptions opts)
{
	std::istringstream in{std::string(text_)};
	std::string raw;
	bool header = false;
	while (std::getline(in, raw)) {
		++line_;
		auto t = tokenize(raw);
		if (t.empty())
			continue;
		const auto &head = t[0].text;
		if (!header) {
			if (head != "elt")
				fail(t[0], "file must start with 'elt <name>'");
			expect_count(t, 2, "elt <name>");
			doc_.name = t[1].text;
			header = true;
			continue;
		}
		if (head == "elt") {
			fail(t[0], "duplicate 'elt' header");
		} else if (head == "init") {
			if (thread_ || in_exec_)
				fail(t[0], "init lines must precede threads");
			expect_count(t, 4, "init <va> -> <pa>");
			if (t[2].text != "->")
				fail(t[2], "expected '->'");
			auto v = va(t[1]);
			if (init_.count(v))
				fail(t[1], "VA '" + t[1].text + "' already has an initial mapping");
			init_[v] = pa(t[3]);
		} else if (head == "thread") {
			if (in_exec_)
				fail(t[0], "thread after exec block");
			expect_count(t, 2, "thread <tid>");
			ThreadId tid = 0;
			try {
				std::size_t used = 0;
				auto v = std::stoul(t[1].text, &used);
				if (used != t[1].text.size())
					throw std::invalid_argument("");
				tid = static_cast<ThreadId>(v);
			} catch (const std::exception &) {
				fail(t[1], "thread id must be a number");
			}
			if (std::find(seen_threads_.begin(), seen_threads_.end(), tid) != seen_threads_.end())
				fail(t[1], "duplicate thread " + t[1].text);
			seen_threads_.push_back(tid);
			thread_ = tid;
			last_user_.reset();
		} else if (head == "rmw") {
			if (!thread_ || in_exec_)
				fail(t[0], "rmw must appear inside a thread");
			expect_count(t, 3, "rmw <readL> <writeL>");
			pending_.push_back({"rmw", {t[1].text, line_, t[1].col}, {t[2].text, line_, t[2].col}});
		} else if (head == "remap") {
			expect_count(t, 3, "remap <pteL> <invlpgL>");
			pending_.push_back({"remap", {t[1].text, line_, t[1].col}, {t[2].text, line_, t[2].col}});
		} else if (head == "exec") {
			if (in_exec_)
				fail(t[0], "duplicate exec block");
			expect_count(t, 1, "exec");
			in_exec_ = true;
		} else if (head == "expect") {
			if (t.size() < 2 || (t[1].text != "permitted" && t[1].text != "forbidden"))
				fail_at(t.size() < 2 ? t[0].col + 6 : t[1].col, "expected 'permitted' or 'forbidden'");
			Expectation x;
			x.forbidden = t[1].text == "forbidden";
			for (std::size_t i = 2; i < t.size(); ++i)
				x.axioms.push_back(t[i].text);
			doc_.expect = x;
		} else if (in_exec_) {
			exec_line(t);
		} else if (head.size() > 1 && head.back() == ':') {
			if (!thread_)
				fail(t[0], "instruction outside a thread");
			instruction(t);
		} else {
			fail(t[0], "unexpected '" + head + "'");
		}
	}
	if (!header)
		throw ParseError(line_ ? line_ : 1, 1, "empty document");

	auto &p = doc_.program;
	// Initial mappings: declared ones first, then a fresh PA for every other VA.
	p.init.assign(va_names_.size(), Pa{});
	for (std::uint32_t v = 0; v < va_names_.size(); ++v) {
		if (auto it = init_.find(v); it != init_.end()) {
			p.init[v] = Pa{it->second};
			continue;
		}
		std::size_t k = 0;
		while (pas_.count(default_pa_name(k)))
			++k;
		Token fresh{default_pa_name(k), 1};
		p.init[v] = Pa{pa(fresh)};
	}
	p.va_names = va_names_;
	p.pa_names = pa_names_;

	ExecutionGraph g;
	const auto n = p.size();
	g.rf = Relation(n);
	g.co = Relation(n);
	g.rf_ptw = Relation(n);
	g.rf_pa = Relation(n);
	g.co_pa = Relation(n);
	g.rf_pa_init = EventSet(n);
	p.remap.resize(n);
	p.rmw.resize(n);
	p.ghost.resize(n);
	p.po.resize(n);
	for (const auto &pp : pending_) {
		auto a = resolve(pp.a), b = resolve(pp.b);
		if (pp.rel == "rf")
			g.rf.insert(a, b);
		else if (pp.rel == "co")
			g.co.insert(a, b);
		else if (pp.rel == "co_pa")
			g.co_pa.insert(a, b);
		else if (pp.rel == "rf_ptw")
			g.rf_ptw.insert(a, b);
		else if (pp.rel == "remap")
			p.remap.insert(a, b);
		else if (pp.rel == "rmw")
			p.rmw.insert(a, b);
	}
	for (const auto &[src, dst] : rf_pa_) {
		auto d = resolve(dst);
		if (src)
			g.rf_pa.insert(resolve(*src), d);
		else
			g.rf_pa_init.insert(d);
	}
	g.co = transitive_closure(g.co);
	g.co_pa = transitive_closure(g.co_pa);

	if (in_exec_) {
		g.program = p;
		if (opts.validate) {
			auto v = validate(g);
			if (!v.empty())
				throw WellFormednessError(std::move(v));
		}
		doc_.exec = std::move(g);
	} else if (opts.validate) {
		auto v = validate_program(p);
		if (!v.empty())
			throw WellFormednessError(std::move(v));
	}
	return std::move(doc_);
}

// Print order: threads by id, user events in po order, each followed by its
// dirty bit write and walk.
std::vector<EventId> print_order(const Program &p)
{
	std::vector<EventId> out;
	for (auto t : p.threads())
		for (auto e : p.thread_events(t)) {
			out.push_back(e);
			if (auto d = p.dirty_bit_of(e))
				out.push_back(*d);
			if (auto w = p.walk_of(e))
				out.push_back(*w);
		}
	return out;
}

std::string va_label(const Program &p, Va v)
{
	return v.id < p.va_names.size() ? p.va_names[v.id] : default_va_name(v.id);
}

std::string pa_label(const Program &p, Pa a)
{
	return a.id < p.pa_names.size() ? p.pa_names[a.id] : default_pa_name(a.id);
}

} // namespace

EltDocument parse_elt(std::string_view text, ParseOptions opts) { return Parser(text).run(opts); }

EltDocument read_elt_file(const std::string &path, ParseOptions opts)
{
	std::ifstream in(path);
	if (!in)
		throw std::runtime_error("cannot open " + path);
	std::stringstream ss;
	ss << in.rdbuf();
	return parse_elt(ss.str(), opts);
}

std::vector<std::string> print_labels(const Program &p)
{
	std::vector<std::string> labels(p.size());
	std::size_t k = 0;
	for (auto e : print_order(p)) {
		const auto &x = p.events[e];
		if (is_ghost(x.kind))
			continue;
		auto idx = std::to_string(k++);
		switch (x.kind) {
		case EventKind::UserRead: labels[e] = "R" + idx; break;
		case EventKind::UserWrite: labels[e] = "W" + idx; break;
		case EventKind::PteWrite: labels[e] = "pte" + idx; break;
		case EventKind::Invlpg: labels[e] = "I" + idx; break;
		case EventKind::Fence: labels[e] = "F" + idx; break;
		default: break;
		}
		if (auto d = p.dirty_bit_of(e))
			labels[*d] = "db" + idx;
		if (auto w = p.walk_of(e))
			labels[*w] = "ptw" + idx;
	}
	return labels;
}

std::string print_elt(const std::string &name, const Program &p, const ExecutionGraph *exec,
		      const Expectation *expect)
{
	auto order = print_order(p);
	auto labels = print_labels(p);
	std::vector<std::size_t> pos(p.size(), 0);
	for (std::size_t i = 0; i < order.size(); ++i)
		pos[order[i]] = i;
	auto by_pos = [&](const std::vector<EventPair> &pairs) {
		auto v = pairs;
		std::sort(v.begin(), v.end(), [&](const EventPair &a, const EventPair &b) {
			return std::pair(pos[a.first], pos[a.second]) < std::pair(pos[b.first], pos[b.second]);
		});
		return v;
	};
	// Immediate edges of a transitive order.
	auto chain = [&](const Relation &r) {
		std::vector<EventPair> v;
		r.for_each([&](EventId a, EventId b) {
			for (EventId c = 0; c < r.universe(); ++c)
				if (r.contains(a, c) && r.contains(c, b))
					return;
			v.emplace_back(a, b);
		});
		return by_pos(v);
	};

	std::ostringstream out;
	out << "elt " << name << "\n";
	for (std::uint32_t v = 0; v < p.init.size(); ++v)
		out << "init " << va_label(p, Va{v}) << " -> " << pa_label(p, p.init[v]) << "\n";
	std::optional<ThreadId> cur;
	for (auto e : order) {
		const auto &x = p.events[e];
		if (cur != x.thread) {
			if (cur)
				for (auto [r, w] : by_pos(p.rmw.pairs()))
					if (p.events[r].thread == *cur)
						out << "  rmw " << labels[r] << " " << labels[w] << "\n";
			cur = x.thread;
			out << "thread " << x.thread << "\n";
		}
		out << "  " << labels[e] << ": ";
		switch (x.kind) {
		case EventKind::UserRead: out << "R " << va_label(p, x.va); break;
		case EventKind::UserWrite: out << "W " << va_label(p, x.va); break;
		case EventKind::PteWrite:
			out << "Wpte " << va_label(p, x.va) << " -> " << pa_label(p, x.target);
			break;
		case EventKind::Invlpg: out << "invlpg " << va_label(p, x.va); break;
		case EventKind::Fence: out << "mfence"; break;
		case EventKind::DirtyBitWrite: out << "ghost db " << labels[*p.invoker(e)]; break;
		case EventKind::PtWalk: out << "ghost ptw " << labels[*p.invoker(e)]; break;
		}
		out << "\n";
	}
	if (cur)
		for (auto [r, w] : by_pos(p.rmw.pairs()))
			if (p.events[r].thread == *cur)
				out << "  rmw " << labels[r] << " " << labels[w] << "\n";

	auto remap_lines = [&](const std::string &indent) {
		for (auto [a, b] : by_pos(p.remap.pairs()))
			out << indent << "remap " << labels[a] << " " << labels[b] << "\n";
	};
	if (!exec) {
		remap_lines("");
	} else {
		const auto &g = *exec;
		out << "exec\n";
		for (auto [a, b] : by_pos(g.rf.pairs()))
			out << "  rf " << labels[a] << " " << labels[b] << "\n";
		for (auto [a, b] : chain(g.co))
			out << "  co " << labels[a] << " " << labels[b] << "\n";
		for (auto [a, b] : chain(g.co_pa))
			out << "  co_pa " << labels[a] << " " << labels[b] << "\n";
		for (auto e : order) {
			if (g.rf_pa_init.contains(e))
				out << "  rf_pa init " << labels[e] << "\n";
		}
		for (auto [a, b] : by_pos(g.rf_pa.pairs()))
			out << "  rf_pa " << labels[a] << " " << labels[b] << "\n";
		for (auto [a, b] : by_pos(g.rf_ptw.pairs()))
			out << "  rf_ptw " << labels[a] << " " << labels[b] << "\n";
		remap_lines("  ");
	}
	if (expect) {
		out << "expect " << (expect->forbidden ? "forbidden" : "permitted");
		for (const auto &a : expect->axioms)
			out << " " << a;
		out << "\n";
	}
	return out.str();
}

std::string print_elt(const EltDocument &doc)
{
	return print_elt(doc.name, doc.program, doc.exec ? &*doc.exec : nullptr,
			 doc.expect ? &*doc.expect : nullptr);
}

} // namespace mtm
