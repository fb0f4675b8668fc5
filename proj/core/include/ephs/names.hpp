#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ephs/errors.hpp"

namespace ephs {

/// Hierarchical identifier: a list of nonempty segments.
/// The empty list is the valid empty name, rendered as "[]".
class Name {
public:
    Name() = default;
    explicit Name(std::vector<std::string> segments);
    Name(std::initializer_list<std::string> segments)
        : Name(std::vector<std::string>(segments))
    {
    }

    /// Parses a dot-separated name such as "a.b.c". Rejects empty input and
    /// segments outside the textual format's character set (letters, digits,
    /// underscore).
    static Name parse(std::string_view dotted);

    const std::vector<std::string>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }
    std::size_t size() const { return segments_.size(); }

    /// Dot-joined rendering; the empty name renders as "[]".
    std::string str() const;

    bool operator==(const Name&) const = default;
    std::strong_ordering operator<=>(const Name& other) const;

private:
    std::vector<std::string> segments_;
};

/// Segments in the textual format are nonempty runs of [A-Za-z0-9_].
bool valid_segment(std::string_view segment);

/// Concatenation: segments of `a` followed by segments of `b`.
Name concat(const Name& a, const Name& b);

/// True iff there is an `s` with n = p * s; when `strict`, additionally
/// s != [].
bool is_prefix(const Name& p, const Name& n, bool strict = false);

/// Raised when a set of names is not prefix-free.
class PrefixConflictError : public Error {
public:
    PrefixConflictError(Name shorter, Name longer);
    Name shorter;
    Name longer;
};

/// Raised when package entries repeat a name.
class DuplicateNameError : public Error {
public:
    explicit DuplicateNameError(Name name);
    Name name;
};

/// Trie whose nodes flagged `is_name` are exactly the names of a namespace.
/// For a valid namespace those nodes are the leaves.
struct NamespaceTrie {
    bool is_name = false;
    std::map<std::string, NamespaceTrie> children;

    bool operator==(const NamespaceTrie&) const = default;
};

/// A finite, prefix-free set of names, kept in segment-wise lexicographic
/// order for deterministic iteration.
class Namespace {
public:
    Namespace() = default;

    /// Validates prefix-freeness (set semantics: duplicates collapse).
    /// Throws PrefixConflictError naming the offending pair otherwise.
    static Namespace of(std::vector<Name> names);

    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::vector<Name>& names() const { return names_; }
    const Name& operator[](std::size_t i) const { return names_[i]; }

    bool contains(const Name& n) const;
    std::optional<std::size_t> index_of(const Name& n) const;

    auto begin() const { return names_.begin(); }
    auto end() const { return names_.end(); }

    NamespaceTrie to_trie() const;
    static Namespace from_trie(const NamespaceTrie& trie);

    bool operator==(const Namespace&) const = default;

private:
    std::vector<Name> names_; // sorted, prefix-free
};

/// A namespace with a total assignment of values to its names, iterated in
/// namespace order.
template <class A>
class Package {
public:
    Package() = default;

    Package(Namespace ns, std::vector<A> values)
        : ns_(std::move(ns)), values_(std::move(values))
    {
        if (ns_.size() != values_.size())
            throw Error("package: assignment must cover exactly the namespace");
    }

    static Package make(std::vector<std::pair<Name, A>> entries)
    {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].first == entries[i - 1].first)
                throw DuplicateNameError(entries[i].first);
        std::vector<Name> names;
        std::vector<A> values;
        names.reserve(entries.size());
        values.reserve(entries.size());
        for (auto& [n, v] : entries) {
            names.push_back(n);
            values.push_back(std::move(v));
        }
        return Package(Namespace::of(std::move(names)), std::move(values));
    }

    const Namespace& names() const { return ns_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    const Name& name_at(std::size_t i) const { return ns_[i]; }
    const A& value_at(std::size_t i) const { return values_[i]; }

    const A* find(const Name& n) const
    {
        auto i = ns_.index_of(n);
        return i ? &values_[*i] : nullptr;
    }

    const A& at(const Name& n) const
    {
        if (const A* v = find(n))
            return *v;
        throw Error("package: no entry named '" + n.str() + "'");
    }

    bool operator==(const Package&) const = default;

private:
    Namespace ns_;
    std::vector<A> values_;
};

/// Named sum of namespaces: { n * a | n in outer, a in outer(n) }.
/// Prefix-free by construction; asserted via Namespace::of.
Namespace named_sum(const Package<Namespace>& outer);

/// Named sum of packages: grafts each leaf package onto its name, carrying
/// the assigned values along.
template <class A>
Package<A> named_sum(const Package<Package<A>>& outer)
{
    std::vector<std::pair<Name, A>> entries;
    for (std::size_t i = 0; i < outer.size(); ++i) {
        const Package<A>& leaf = outer.value_at(i);
        for (std::size_t j = 0; j < leaf.size(); ++j)
            entries.emplace_back(concat(outer.name_at(i), leaf.name_at(j)),
                                 leaf.value_at(j));
    }
    return Package<A>::make(std::move(entries));
}

} // namespace ephs
