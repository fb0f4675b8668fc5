#include "ephs/names.hpp"

#include <algorithm>
#include <cctype>

namespace ephs {

Name::Name(std::vector<std::string> segments) : segments_(std::move(segments))
{
    for (const auto& s : segments_)
        if (s.empty())
            throw Error("name: segments must be nonempty");
}

bool valid_segment(std::string_view segment)
{
    if (segment.empty())
        return false;
    for (char c : segment)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

Name Name::parse(std::string_view dotted)
{
    if (dotted.empty())
        throw Error("name: empty text");
    std::vector<std::string> segments;
    std::size_t start = 0;
    while (true) {
        std::size_t dot = dotted.find('.', start);
        std::string_view seg = dotted.substr(
            start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
        if (!valid_segment(seg))
            throw Error("name: invalid segment '" + std::string(seg) + "' in '" +
                        std::string(dotted) + "'");
        segments.emplace_back(seg);
        if (dot == std::string_view::npos)
            break;
        start = dot + 1;
    }
    return Name(std::move(segments));
}

std::string Name::str() const
{
    if (segments_.empty())
        return "[]";
    std::string out = segments_.front();
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        out += '.';
        out += segments_[i];
    }
    return out;
}

std::strong_ordering Name::operator<=>(const Name& other) const
{
    const auto& a = segments_;
    const auto& b = other.segments_;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
        if (auto c = a[i] <=> b[i]; c != 0)
            return c;
    return a.size() <=> b.size();
}

Name concat(const Name& a, const Name& b)
{
    std::vector<std::string> segments = a.segments();
    segments.insert(segments.end(), b.segments().begin(), b.segments().end());
    return Name(std::move(segments));
}

bool is_prefix(const Name& p, const Name& n, bool strict)
{
    if (p.size() > n.size())
        return false;
    if (strict && p.size() == n.size())
        return false;
    return std::equal(p.segments().begin(), p.segments().end(), n.segments().begin());
}

PrefixConflictError::PrefixConflictError(Name shorter_name, Name longer_name)
    : Error("namespace: '" + shorter_name.str() + "' is a strict prefix of '" +
            longer_name.str() + "'"),
      shorter(std::move(shorter_name)),
      longer(std::move(longer_name))
{
}

DuplicateNameError::DuplicateNameError(Name dup)
    : Error("duplicate name '" + dup.str() + "'"), name(std::move(dup))
{
}

Namespace Namespace::of(std::vector<Name> names)
{
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    // In sorted order a strict prefix is immediately followed by one of its
    // extensions, so checking adjacent pairs suffices.
    for (std::size_t i = 1; i < names.size(); ++i)
        if (is_prefix(names[i - 1], names[i], /*strict=*/true))
            throw PrefixConflictError(names[i - 1], names[i]);
    Namespace ns;
    ns.names_ = std::move(names);
    return ns;
}

bool Namespace::contains(const Name& n) const
{
    return std::binary_search(names_.begin(), names_.end(), n);
}

std::optional<std::size_t> Namespace::index_of(const Name& n) const
{
    auto it = std::lower_bound(names_.begin(), names_.end(), n);
    if (it == names_.end() || *it != n)
        return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

NamespaceTrie Namespace::to_trie() const
{
    NamespaceTrie root;
    for (const Name& n : names_) {
        NamespaceTrie* node = &root;
        for (const auto& seg : n.segments())
            node = &node->children[seg];
        node->is_name = true;
    }
    return root;
}

namespace {

void collect_names(const NamespaceTrie& node, std::vector<std::string>& path,
                   std::vector<Name>& out)
{
    if (node.is_name)
        out.emplace_back(path);
    for (const auto& [seg, child] : node.children) {
        path.push_back(seg);
        collect_names(child, path, out);
        path.pop_back();
    }
}

} // namespace

Namespace Namespace::from_trie(const NamespaceTrie& trie)
{
    std::vector<Name> names;
    std::vector<std::string> path;
    collect_names(trie, path, names);
    return Namespace::of(std::move(names));
}

Namespace named_sum(const Package<Namespace>& outer)
{
    std::vector<Name> names;
    for (std::size_t i = 0; i < outer.size(); ++i)
        for (const Name& a : outer.value_at(i))
            names.push_back(concat(outer.name_at(i), a));
    return Namespace::of(std::move(names));
}

} // namespace ephs
