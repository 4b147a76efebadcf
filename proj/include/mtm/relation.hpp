#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

namespace mtm {

// Events are identified by their index in the owning graph.
using EventId = std::uint32_t;
using EventPair = std::pair<EventId, EventId>;

class EventSet {
public:
	EventSet() = default;
	explicit EventSet(std::size_t universe);
	EventSet(std::initializer_list<EventId> ids);

	static EventSet all(std::size_t universe);

	std::size_t universe() const { return n_; }
	void insert(EventId e);
	void erase(EventId e);
	bool contains(EventId e) const;
	std::size_t size() const;
	bool empty() const;
	std::vector<EventId> elements() const;

	EventSet &operator|=(const EventSet &o);
	EventSet &operator&=(const EventSet &o);
	EventSet &operator-=(const EventSet &o);
	bool operator==(const EventSet &o) const;

	template <class F> void for_each(F &&f) const
	{
		for (std::size_t w = 0; w < words_.size(); ++w) {
			auto bits = words_[w];
			while (bits) {
				auto b = static_cast<unsigned>(__builtin_ctzll(bits));
				f(static_cast<EventId>(w * 64 + b));
				bits &= bits - 1;
			}
		}
	}

private:
	void grow(std::size_t n);

	std::size_t n_ = 0;
	std::vector<std::uint64_t> words_;
};

// Binary relation over events, stored as a dense bit matrix. The universe
// grows on insert, and values compare equal regardless of universe padding.
class Relation {
public:
	Relation() = default;
	explicit Relation(std::size_t universe);
	Relation(std::initializer_list<EventPair> pairs);

	std::size_t universe() const { return n_; }
	void resize(std::size_t universe);
	void clear();

	void insert(EventId a, EventId b);
	void insert(const EventPair &p) { insert(p.first, p.second); }
	void erase(EventId a, EventId b);
	bool contains(EventId a, EventId b) const;
	bool empty() const;
	std::size_t size() const;

	// Sorted lexicographically.
	std::vector<EventPair> pairs() const;
	EventSet successors(EventId a) const;
	EventSet predecessors(EventId b) const;
	EventSet domain() const;
	EventSet range() const;
	bool row_empty(EventId a) const;

	Relation inverse() const;
	// Keeps pairs whose endpoints are both in `keep`.
	Relation restrict(const EventSet &keep) const;
	Relation restrict(const EventSet &from, const EventSet &to) const;

	Relation &operator|=(const Relation &o);
	Relation &operator&=(const Relation &o);
	Relation &operator-=(const Relation &o);
	bool operator==(const Relation &o) const;

	template <class F> void for_each(F &&f) const
	{
		for (std::size_t a = 0; a < n_; ++a) {
			const auto *row = &bits_[a * w_];
			for (std::size_t w = 0; w < w_; ++w) {
				auto bits = row[w];
				while (bits) {
					auto b = static_cast<unsigned>(__builtin_ctzll(bits));
					f(static_cast<EventId>(a), static_cast<EventId>(w * 64 + b));
					bits &= bits - 1;
				}
			}
		}
	}

private:
	friend Relation compose(const Relation &, const Relation &);
	friend Relation transitive_closure(const Relation &);
	friend bool is_acyclic(const Relation &);
	friend std::optional<std::vector<EventId>> find_cycle(const Relation &);

	std::uint64_t *row(std::size_t a) { return &bits_[a * w_]; }
	const std::uint64_t *row(std::size_t a) const { return &bits_[a * w_]; }

	std::size_t n_ = 0;
	std::size_t w_ = 0;
	std::vector<std::uint64_t> bits_;
};

Relation operator|(Relation a, const Relation &b);
Relation operator&(Relation a, const Relation &b);
Relation operator-(Relation a, const Relation &b);

// a;b
Relation compose(const Relation &a, const Relation &b);
Relation transitive_closure(const Relation &r);
bool is_acyclic(const Relation &r);

// Shortest cycle, returned as [e0, ..., ek, e0]. Ties go to the cycle whose
// smallest event is least, then to the lexicographically least path.
std::optional<std::vector<EventId>> find_cycle(const Relation &r);

} // namespace mtm
