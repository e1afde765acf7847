#include "omtk/omt_tree.hpp"

#include "omt_tree_data.hpp"
#include "omtk/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <set>

namespace omtk {

using nlohmann::json;

std::string_view to_string(SlotKind kind)
{
    switch (kind) {
    case SlotKind::Variable: return "variable";
    case SlotKind::VariableList: return "variable-list";
    case SlotKind::Expression: return "expression";
    case SlotKind::Rational: return "rational";
    case SlotKind::PositiveInteger: return "positive-integer";
    }
    return "?";
}

std::optional<SlotKind> parse_slot_kind(std::string_view text)
{
    for (auto k : {SlotKind::Variable, SlotKind::VariableList, SlotKind::Expression, SlotKind::Rational,
             SlotKind::PositiveInteger}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    return std::nullopt;
}

namespace {

[[noreturn]] void malformed(const std::string& what)
{
    throw Error(ErrorCode::MalformedDocument, "malformed OMT tree: " + what);
}

} // namespace

OmtTree::OmtTree(int root, std::map<int, OmtNode> nodes) : root_(root), nodes_(std::move(nodes))
{
    if (!nodes_.contains(root_)) {
        malformed("root node missing");
    }
    for (const auto& [id, node] : nodes_) {
        if (node.id != id) {
            malformed("node id mismatch at " + std::to_string(id));
        }
        if (node.is_leaf() != node.children.empty()) {
            malformed("node " + std::to_string(id) + " must be either a leaf with a template or internal with children");
        }
        if (!node.is_leaf() && node.children.size() < 2) {
            malformed("internal node " + std::to_string(id) + " has fewer than two children");
        }
        if (!node.is_leaf() && node.question.empty()) {
            malformed("internal node " + std::to_string(id) + " has no question");
        }
        std::set<std::string> answers;
        for (const auto& child : node.children) {
            if (!nodes_.contains(child.child)) {
                malformed("node " + std::to_string(id) + " points at missing child " + std::to_string(child.child));
            }
            if (!answers.insert(child.answer).second) {
                malformed("node " + std::to_string(id) + " repeats answer '" + child.answer + "'");
            }
            if (child.child == root_ || !parent_.emplace(child.child, id).second) {
                malformed("node " + std::to_string(child.child) + " has more than one parent");
            }
        }
        if (node.template_spec) {
            std::set<std::string> slots;
            for (const auto& slot : node.template_spec->slots) {
                if (!slots.insert(slot.name).second) {
                    malformed("leaf " + std::to_string(id) + " repeats slot '" + slot.name + "'");
                }
            }
        }
    }
    // Every node reachable from the root (one parent each + reachability => a tree).
    std::set<int> seen{root_};
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        for (const auto& child : nodes_.at(id).children) {
            if (seen.insert(child.child).second) {
                stack.push_back(child.child);
            }
        }
    }
    if (seen.size() != nodes_.size()) {
        malformed("tree is not connected");
    }
}

const OmtNode& OmtTree::node(int id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw Error(ErrorCode::UnknownNode, "no OMT node " + std::to_string(id), std::to_string(id));
    }
    return it->second;
}

std::vector<int> OmtTree::leaves() const
{
    std::vector<int> out;
    for (const auto& [id, node] : nodes_) {
        if (node.is_leaf()) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<std::string> OmtTree::path_to(int id) const
{
    (void)node(id);
    std::vector<std::string> answers;
    while (id != root_) {
        int parent = parent_.at(id);
        for (const auto& child : nodes_.at(parent).children) {
            if (child.child == id) {
                answers.push_back(child.answer);
            }
        }
        id = parent;
    }
    std::reverse(answers.begin(), answers.end());
    return answers;
}

int OmtTree::descend(int id, std::string_view answer) const
{
    const OmtNode& n = node(id);
    if (n.is_leaf()) {
        throw Error(ErrorCode::NotInternal, "node " + std::to_string(id) + " is a leaf", std::to_string(id));
    }
    for (const auto& child : n.children) {
        if (child.answer == answer) {
            return child.child;
        }
    }
    throw Error(ErrorCode::UnknownAnswer, "node " + std::to_string(id) + " has no answer '" + std::string(answer) + "'",
        std::string(answer));
}

// ---------------------------------------------------------------------------
// instantiate

namespace {

class SlotReader {
public:
    SlotReader(const TemplateSpec& spec, const Bindings& bindings, int leaf)
        : spec_(spec), bindings_(bindings), leaf_(leaf)
    {
        for (const auto& slot : spec_.slots) {
            auto it = bindings_.find(slot.name);
            if (it == bindings_.end()) {
                throw Error(ErrorCode::MissingSlot, "leaf " + std::to_string(leaf_) + " needs slot '" + slot.name + "'",
                    slot.name);
            }
            if (!matches(slot.kind, it->second)) {
                mismatch(slot.name, "expected a " + std::string(to_string(slot.kind)));
            }
        }
    }

    template <class T>
    const T& get(const std::string& name) const
    {
        return std::get<T>(bindings_.at(name));
    }

    [[noreturn]] void mismatch(const std::string& slot, const std::string& why) const
    {
        throw Error(ErrorCode::KindMismatch, "slot '" + slot + "' of leaf " + std::to_string(leaf_) + ": " + why, slot);
    }

    [[nodiscard]] std::string fixed(const std::string& key) const
    {
        auto it = spec_.fixed.find(key);
        return it == spec_.fixed.end() ? std::string{} : it->second;
    }

private:
    static bool matches(SlotKind kind, const SlotValue& value)
    {
        switch (kind) {
        case SlotKind::Variable: return std::holds_alternative<VarId>(value);
        case SlotKind::VariableList: return std::holds_alternative<std::vector<VarId>>(value);
        case SlotKind::Expression: return std::holds_alternative<LinearExpr>(value);
        case SlotKind::Rational: return std::holds_alternative<Rational>(value);
        case SlotKind::PositiveInteger:
            return std::holds_alternative<std::int64_t>(value) && std::get<std::int64_t>(value) >= 1;
        }
        return false;
    }

    const TemplateSpec& spec_;
    const Bindings& bindings_;
    int leaf_;
};

bool single_unit_term(const LinearExpr& e)
{
    return e.terms().size() == 1 && e.terms().begin()->second == Rational(1) && e.constant().is_zero();
}

Sense fixed_sense(const SlotReader& r)
{
    return parse_sense(r.fixed("sense")).value_or(Sense::LE);
}

template <class Set>
Set make_set(const SlotReader& r)
{
    Set set;
    if (r.fixed("weighted") == "true") {
        const auto& e = r.get<LinearExpr>("weighted_members");
        if (e.is_constant()) {
            r.mismatch("weighted_members", "needs at least one member");
        }
        if (!e.constant().is_zero()) {
            r.mismatch("weighted_members", "must not carry a constant term");
        }
        std::vector<Rational> weights;
        for (const auto& [var, coef] : e.terms()) {
            set.members.push_back(var);
            weights.push_back(coef);
        }
        set.rhs = r.get<std::int64_t>("rhs");
        bool unit = std::all_of(weights.begin(), weights.end(), [](const Rational& w) { return w == Rational(1); });
        if (unit && set.rhs == 1) {
            r.mismatch("weighted_members", "unit weights with right-hand side 1 is the unweighted leaf");
        }
        set.weights = std::move(weights);
    } else {
        set.members = r.get<std::vector<VarId>>("members");
        set.rhs = 1;
    }
    return set;
}

} // namespace

TypedConstraint OmtTree::instantiate(int leaf, const Bindings& bindings) const
{
    const OmtNode& n = node(leaf);
    if (!n.is_leaf()) {
        throw Error(ErrorCode::NotInternal, "node " + std::to_string(leaf) + " is internal, not a leaf",
            std::to_string(leaf));
    }
    const TemplateSpec& spec = *n.template_spec;
    SlotReader r(spec, bindings, leaf);

    TypedConstraint out;
    out.omt_node = leaf;
    out.label = n.label;
    switch (spec.family) {
    case Family::Bound: {
        Bound b;
        b.sense = fixed_sense(r);
        if (r.fixed("shape") == "single") {
            b.expr = LinearExpr(r.get<VarId>("var"));
        } else {
            b.expr = r.get<LinearExpr>("expr");
            if (r.fixed("shape") == "weighted" && single_unit_term(b.expr)) {
                r.mismatch("expr", "a single quantity belongs to the single-quantity leaf");
            }
        }
        if (r.fixed("bound") == "expression") {
            b.bound = r.get<LinearExpr>("bound");
        } else {
            b.bound = r.get<Rational>("bound");
        }
        out.body = std::move(b);
        break;
    }
    case Family::ConditionalBound: {
        ConditionalBound c;
        c.sense = fixed_sense(r);
        c.expr = r.get<LinearExpr>("expr");
        c.bound = r.get<Rational>("bound");
        c.indicator = r.get<VarId>("indicator");
        c.off_behavior = parse_off_behavior(r.fixed("off_behavior")).value_or(OffBehavior::ForceZero);
        out.body = std::move(c);
        break;
    }
    case Family::Balance: {
        Balance b;
        b.lhs = r.get<LinearExpr>("lhs");
        b.rhs = r.get<LinearExpr>("rhs");
        b.flavor = parse_balance_flavor(r.fixed("flavor")).value_or(BalanceFlavor::Assignment);
        out.body = std::move(b);
        break;
    }
    case Family::SetPacking: out.body = make_set<SetPacking>(r); break;
    case Family::SetPartitioning: out.body = make_set<SetPartitioning>(r); break;
    case Family::SetCovering: out.body = make_set<SetCovering>(r); break;
    case Family::VariableFix: out.body = VariableFix{r.get<VarId>("var"), r.get<Rational>("value")}; break;
    case Family::IfThen: {
        IfThen c;
        c.antecedents = r.get<std::vector<VarId>>("antecedents");
        if (r.fixed("consequents") == "single") {
            c.consequents = {r.get<VarId>("consequent")};
        } else {
            c.consequents = r.get<std::vector<VarId>>("consequents");
            if (c.consequents.size() < 2) {
                r.mismatch("consequents", "needs at least two consequents");
            }
        }
        out.body = std::move(c);
        break;
    }
    case Family::EitherOr: {
        Sense s = fixed_sense(r);
        EitherOr c;
        c.alternatives.push_back({r.get<LinearExpr>("first"), s, r.get<Rational>("first_bound")});
        c.alternatives.push_back({r.get<LinearExpr>("second"), s, r.get<Rational>("second_bound")});
        out.body = std::move(c);
        break;
    }
    case Family::RawRow:
        throw Error(ErrorCode::MalformedDocument, "tree leaves cannot produce raw rows");
    }
    return out;
}

// ---------------------------------------------------------------------------
// classify

namespace {

template <class Set>
bool unit_choice(const Set& s)
{
    if (s.rhs != 1) {
        return false;
    }
    return !s.weights ||
           std::all_of(s.weights->begin(), s.weights->end(), [](const Rational& w) { return w == Rational(1); });
}

[[noreturn]] void unclassifiable(const TypedConstraint& c, const std::string& why)
{
    throw Error(ErrorCode::Unclassifiable, why, c.label);
}

} // namespace

int classify(const TypedConstraint& constraint)
{
    switch (constraint.family()) {
    case Family::ConditionalBound: {
        const auto& c = std::get<ConditionalBound>(constraint.body);
        if (c.sense == Sense::EQ) {
            unclassifiable(constraint, "conditional bound with EQ sense");
        }
        return c.sense == Sense::LE ? 3 : 9;
    }
    case Family::Bound: {
        const auto& c = std::get<Bound>(constraint.body);
        if (c.sense == Sense::EQ) {
            unclassifiable(constraint, "bound with EQ sense");
        }
        bool le = c.sense == Sense::LE;
        if (std::holds_alternative<LinearExpr>(c.bound)) {
            return le ? 2 : 8;
        }
        if (single_unit_term(c.expr)) {
            return le ? 7 : 5;
        }
        return le ? 1 : 4;
    }
    case Family::Balance:
        switch (std::get<Balance>(constraint.body).flavor) {
        case BalanceFlavor::Interperiod: return 12;
        case BalanceFlavor::Assignment: return 13;
        case BalanceFlavor::Flow: return 14;
        case BalanceFlavor::Blending: return 15;
        case BalanceFlavor::Initial: return 16;
        }
        break;
    case Family::SetPacking: return unit_choice(std::get<SetPacking>(constraint.body)) ? 11 : 20;
    case Family::SetPartitioning: return unit_choice(std::get<SetPartitioning>(constraint.body)) ? 17 : 21;
    case Family::SetCovering: return 18;
    case Family::VariableFix: return 19;
    case Family::IfThen: return std::get<IfThen>(constraint.body).consequents.size() == 1 ? 23 : 24;
    case Family::EitherOr: return 22;
    case Family::RawRow: break;
    }
    unclassifiable(constraint, "raw rows have no place in the tree");
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json node_to_json(const OmtNode& n)
{
    json children = json::array();
    for (const auto& c : n.children) {
        children.push_back({{"answer", c.answer}, {"child", c.child}});
    }
    json tmpl = nullptr;
    if (n.template_spec) {
        json slots = json::array();
        for (const auto& s : n.template_spec->slots) {
            slots.push_back({{"name", s.name}, {"kind", to_string(s.kind)}});
        }
        tmpl = {{"family", to_string(n.template_spec->family)}, {"slots", slots}, {"fixed", n.template_spec->fixed}};
    }
    return {{"id", n.id}, {"label", n.label}, {"kind", n.is_leaf() ? "leaf" : "internal"}, {"question", n.question},
        {"children", children}, {"template", tmpl}, {"anchored", n.anchored}};
}

std::string OmtTree::to_json() const
{
    json nodes = json::array();
    for (const auto& [id, n] : nodes_) {
        nodes.push_back(node_to_json(n));
    }
    json doc = {{"schema_version", "1"}, {"root", root_}, {"nodes", nodes}};
    return doc.dump(2) + "\n";
}

OmtTree OmtTree::from_json(std::string_view text)
{
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        malformed("not a JSON object");
    }
    if (doc.value("schema_version", "") != "1") {
        throw Error(ErrorCode::SchemaMismatch, "unsupported OMT tree schema version");
    }
    try {
        std::map<int, OmtNode> nodes;
        for (const auto& jn : doc.at("nodes")) {
            OmtNode n;
            n.id = jn.at("id").get<int>();
            n.label = jn.at("label").get<std::string>();
            n.question = jn.at("question").get<std::string>();
            n.anchored = jn.at("anchored").get<bool>();
            for (const auto& jc : jn.at("children")) {
                n.children.push_back({jc.at("answer").get<std::string>(), jc.at("child").get<int>()});
            }
            const auto& jt = jn.at("template");
            std::string kind = jn.at("kind").get<std::string>();
            if (!jt.is_null()) {
                TemplateSpec t;
                auto family = parse_family(jt.at("family").get<std::string>());
                if (!family) {
                    malformed("unknown family in node " + std::to_string(n.id));
                }
                t.family = *family;
                for (const auto& js : jt.at("slots")) {
                    auto sk = parse_slot_kind(js.at("kind").get<std::string>());
                    if (!sk) {
                        malformed("unknown slot kind in node " + std::to_string(n.id));
                    }
                    t.slots.push_back({js.at("name").get<std::string>(), *sk});
                }
                t.fixed = jt.at("fixed").get<std::map<std::string, std::string>>();
                n.template_spec = std::move(t);
            }
            if ((kind == "leaf") != n.is_leaf()) {
                malformed("node " + std::to_string(n.id) + " kind disagrees with its template");
            }
            if (!nodes.emplace(n.id, n).second) {
                malformed("duplicate node id " + std::to_string(n.id));
            }
        }
        return OmtTree(doc.at("root").get<int>(), std::move(nodes));
    } catch (const json::exception& e) {
        malformed(e.what());
    }
}

std::string_view builtin_tree_document()
{
    return detail::kOmtTreeJson;
}

const OmtTree& load_tree()
{
    static const OmtTree tree = OmtTree::from_json(detail::kOmtTreeJson);
    return tree;
}

} // namespace omtk
