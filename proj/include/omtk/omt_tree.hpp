#pragma once

#include "omtk/model.hpp"

#include "json.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace omtk {

enum class SlotKind { Variable, VariableList, Expression, Rational, PositiveInteger };

std::string_view to_string(SlotKind kind);
std::optional<SlotKind> parse_slot_kind(std::string_view text);

struct SlotSpec {
    std::string name;
    SlotKind kind = SlotKind::Variable;
    friend bool operator==(const SlotSpec&, const SlotSpec&) = default;
};

struct TemplateSpec {
    Family family = Family::Bound;
    std::vector<SlotSpec> slots;
    /// Preset fields, e.g. {"sense": "LE", "off_behavior": "ForceZero"}.
    std::map<std::string, std::string> fixed;
    friend bool operator==(const TemplateSpec&, const TemplateSpec&) = default;
};

struct OmtChild {
    std::string answer;
    int child = 0;
    friend bool operator==(const OmtChild&, const OmtChild&) = default;
};

struct OmtNode {
    int id = 0;
    std::string label;
    std::string question; // empty on leaves
    std::vector<OmtChild> children;
    std::optional<TemplateSpec> template_spec; // present iff leaf
    bool anchored = false;

    [[nodiscard]] bool is_leaf() const noexcept { return template_spec.has_value(); }
    friend bool operator==(const OmtNode&, const OmtNode&) = default;
};

using SlotValue = std::variant<VarId, std::vector<VarId>, LinearExpr, Rational, std::int64_t>;
using Bindings = std::map<std::string, SlotValue>;

/// The optimization modelling tree: questions at internal nodes, constraint
/// templates at leaves. Immutable once loaded.
class OmtTree {
public:
    OmtTree(int root, std::map<int, OmtNode> nodes);

    [[nodiscard]] int root() const noexcept { return root_; }
    [[nodiscard]] const std::map<int, OmtNode>& nodes() const noexcept { return nodes_; }
    /// Throws UnknownNode.
    [[nodiscard]] const OmtNode& node(int id) const;
    [[nodiscard]] bool contains(int id) const { return nodes_.contains(id); }
    [[nodiscard]] std::vector<int> leaves() const;
    /// Answer labels leading from the root to `id`. Throws UnknownNode.
    [[nodiscard]] std::vector<std::string> path_to(int id) const;

    /// Throws NotInternal, UnknownAnswer or UnknownNode.
    [[nodiscard]] int descend(int id, std::string_view answer) const;

    /// Fill a leaf's template. Throws UnknownNode, NotInternal (for internal
    /// ids), MissingSlot or KindMismatch.
    [[nodiscard]] TypedConstraint instantiate(int leaf, const Bindings& bindings) const;

    /// Canonical JSON document (sorted keys, two-space indent, trailing newline).
    [[nodiscard]] std::string to_json() const;
    /// Parse and structurally check a tree document. Throws MalformedDocument or SchemaMismatch.
    static OmtTree from_json(std::string_view text);

    friend bool operator==(const OmtTree&, const OmtTree&) = default;

private:
    int root_;
    std::map<int, OmtNode> nodes_;
    std::map<int, int> parent_;
};

/// One node in the document schema of OmtTree::to_json.
nlohmann::json node_to_json(const OmtNode& node);

/// The built-in tree, parsed once from the embedded document.
const OmtTree& load_tree();

/// The embedded document text exactly as shipped in data/omt_tree.json.
std::string_view builtin_tree_document();

/// Leaf id for a constraint. Throws Unclassifiable for RawRow.
int classify(const TypedConstraint& constraint);

/// Node ids cited by number in the source material.
inline constexpr std::array<int, 12> kAnchoredNodes = {2, 3, 7, 8, 9, 11, 12, 13, 14, 17, 19, 24};

} // namespace omtk
