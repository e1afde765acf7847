#include "omtk/corpus.hpp"

#include "omtk/error.hpp"
#include "omtk/omt_tree.hpp"

namespace omtk {

namespace {

std::string idx(std::string_view base, std::initializer_list<std::int64_t> indices)
{
    std::string out(base);
    for (auto i : indices) {
        out += "_" + std::to_string(i);
    }
    return out;
}

/// Builder shorthand; every constraint is tagged with its classified leaf.
class Builder {
public:
    explicit Builder(std::string name) : model_(std::move(name)) {}

    VarId binary(const std::string& name) { return model_.add_binary(name); }
    VarId integer(const std::string& name, std::int64_t lo, std::int64_t hi) { return model_.add_integer(name, lo, hi); }

    void add(ConstraintBody body, std::string label)
    {
        TypedConstraint c{std::move(body), std::move(label), std::nullopt};
        c.omt_node = classify(c);
        model_.add_constraint(std::move(c));
    }

    void objective(Direction direction, LinearExpr expr) { model_.set_objective(Objective{direction, std::move(expr)}); }

    Model take() { return std::move(model_); }

private:
    Model model_;
};

ConditionalBound conditional(LinearExpr expr, Sense sense, BoundSpec bound, VarId indicator, OffBehavior off)
{
    return ConditionalBound{std::move(expr), sense, std::move(bound), indicator, off};
}

// Chemical batch scheduling. Batch sizes are counted in units of the smallest
// batch increment, so every quantity is a small integer.
Model chemical(const Scale& sc)
{
    const auto U = sc.at("units");
    const auto I = sc.at("tasks");
    const auto H = sc.at("periods");
    const std::int64_t unit_cap[] = {2, 3, 2};
    const std::int64_t storage_cap = 3;
    auto demand = [](std::int64_t i, std::int64_t t) { return (i + 2 * t) % 3; };

    Builder b("chemical-scheduling");
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, VarId> s;
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, VarId> batch;
    std::map<std::pair<std::int64_t, std::int64_t>, VarId> inv;
    LinearExpr cost;
    for (std::int64_t t = 0; t < H; ++t) {
        for (std::int64_t u = 0; u < U; ++u) {
            for (std::int64_t i = 0; i < I; ++i) {
                s[{u, i, t}] = b.binary(idx("s", {u, i, t}));
                batch[{u, i, t}] = b.integer(idx("b", {u, i, t}), 0, 3);
                cost += Rational(2) * s[{u, i, t}] + LinearExpr(batch[{u, i, t}]);
            }
        }
        for (std::int64_t i = 0; i < I; ++i) {
            inv[{i, t}] = b.integer(idx("inv", {i, t}), 0, 5);
            cost += LinearExpr(inv[{i, t}]);
        }
    }
    for (std::int64_t t = 0; t < H; ++t) {
        for (std::int64_t u = 0; u < U; ++u) {
            SetPacking one;
            for (std::int64_t i = 0; i < I; ++i) {
                one.members.push_back(s[{u, i, t}]);
            }
            b.add(std::move(one), "set1/u=" + std::to_string(u) + ",t=" + std::to_string(t));
            for (std::int64_t i = 0; i < I; ++i) {
                const std::string at = "/u=" + std::to_string(u) + ",i=" + std::to_string(i) + ",t=" + std::to_string(t);
                b.add(conditional(batch[{u, i, t}], Sense::LE, Rational(unit_cap[u]), s[{u, i, t}], OffBehavior::ForceZero),
                    "set2" + at + ",max");
                b.add(conditional(batch[{u, i, t}], Sense::GE, Rational(1), s[{u, i, t}], OffBehavior::ForceZero),
                    "set2" + at + ",min");
            }
        }
        for (std::int64_t i = 0; i < I; ++i) {
            const std::string at = "/i=" + std::to_string(i) + ",t=" + std::to_string(t);
            LinearExpr supply = t == 0 ? LinearExpr(Rational(0)) : LinearExpr(inv[{i, t - 1}]);
            for (std::int64_t u = 0; u < U; ++u) {
                supply += LinearExpr(batch[{u, i, t}]);
            }
            supply -= LinearExpr(Rational(demand(i, t)));
            b.add(Balance{inv[{i, t}], std::move(supply), BalanceFlavor::Flow}, "set3a" + at);
            b.add(Bound{inv[{i, t}], Sense::LE, Rational(storage_cap)}, "set3b" + at);
        }
    }
    b.objective(Direction::Minimize, std::move(cost));
    return b.take();
}

Model supply_chain(const Scale& sc)
{
    const auto P = sc.at("products");
    const auto T = sc.at("periods");
    auto demand = [](std::int64_t p, std::int64_t t) { return (p + t) % 2 + 1; };
    const std::int64_t initial_stock = 1;

    Builder b("supply-chain-planning");
    std::map<std::pair<std::int64_t, std::int64_t>, VarId> y, x, q, st;
    std::vector<VarId> w, tot;
    LinearExpr cost;
    for (std::int64_t t = 0; t < T; ++t) {
        for (std::int64_t p = 0; p < P; ++p) {
            y[{p, t}] = b.binary(idx("y", {p, t}));
            x[{p, t}] = b.integer(idx("x", {p, t}), 0, 3);
            q[{p, t}] = b.integer(idx("q", {p, t}), 0, 3);
            st[{p, t}] = b.integer(idx("st", {p, t}), 0, 3);
            cost += Rational(3) * y[{p, t}] + LinearExpr(x[{p, t}]) + LinearExpr(st[{p, t}]);
        }
        w.push_back(b.integer(idx("w", {t}), 0, 4));
        tot.push_back(b.integer(idx("tot", {t}), 0, 3 * P));
        cost += Rational(2) * w.back();
    }
    for (std::int64_t t = 0; t < T; ++t) {
        const std::string tt = "t=" + std::to_string(t);
        LinearExpr made;
        LinearExpr shipped;
        for (std::int64_t p = 0; p < P; ++p) {
            const std::string at = "/p=" + std::to_string(p) + "," + tt;
            LinearExpr before = t == 0 ? LinearExpr(Rational(initial_stock)) : LinearExpr(st[{p, t - 1}]);
            b.add(Balance{st[{p, t}], before + LinearExpr(x[{p, t}]) - LinearExpr(q[{p, t}]), BalanceFlavor::Interperiod},
                "set1" + at);
            b.add(Balance{q[{p, t}], LinearExpr(Rational(demand(p, t))), BalanceFlavor::Assignment}, "set2" + at);
            b.add(conditional(x[{p, t}], Sense::LE, Rational(2), y[{p, t}], OffBehavior::ForceZero), "set4" + at + ",max");
            b.add(conditional(x[{p, t}], Sense::GE, Rational(1), y[{p, t}], OffBehavior::ForceZero), "set4" + at + ",min");
            made += LinearExpr(x[{p, t}]);
            shipped += LinearExpr(q[{p, t}]);
        }
        b.add(Bound{made, Sense::LE, LinearExpr(w[t])}, "set3/" + tt + ",max");
        b.add(Bound{made, Sense::GE, LinearExpr(w[t]) - LinearExpr(Rational(1))}, "set3/" + tt + ",min");
        b.add(Balance{tot[t], shipped, BalanceFlavor::Assignment}, "set5/" + tt);
        if (t > 0) {
            b.add(Bound{w[t], Sense::LE, LinearExpr(w[t - 1]) + LinearExpr(Rational(1))}, "set6/" + tt + ",up");
            b.add(Bound{w[t], Sense::GE, LinearExpr(w[t - 1]) - LinearExpr(Rational(1))}, "set6/" + tt + ",down");
        }
    }
    b.objective(Direction::Minimize, std::move(cost));
    return b.take();
}

Model timetabling(const Scale& sc)
{
    const auto C = sc.at("courses");
    const auto P = sc.at("professors");
    const auto S = sc.at("slots");

    Builder b("course-timetabling");
    std::map<std::pair<std::int64_t, std::int64_t>, VarId> a, z;
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, VarId> x;
    std::vector<VarId> h, o, r;
    // Assignment variables come first so the implications close as early as possible.
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t p = 0; p < P; ++p) {
            a[{c, p}] = b.binary(idx("a", {c, p}));
        }
    }
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t s = 0; s < S; ++s) {
            z[{c, s}] = b.binary(idx("z", {c, s}));
        }
    }
    for (std::int64_t p = 0; p < P; ++p) {
        h.push_back(b.binary(idx("h", {p})));
    }
    for (std::int64_t s = 0; s < S; ++s) {
        o.push_back(b.binary(idx("o", {s})));
    }
    for (std::int64_t c = 0; c < C; ++c) {
        r.push_back(b.binary(idx("r", {c})));
    }
    LinearExpr value;
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t p = 0; p < P; ++p) {
            for (std::int64_t s = 0; s < S; ++s) {
                x[{c, p, s}] = b.binary(idx("x", {c, p, s}));
                value += Rational(1 + (c + p + s) % 2) * x[{c, p, s}];
            }
        }
    }
    for (VarId v : h) {
        value -= LinearExpr(v);
    }
    for (VarId v : o) {
        value -= LinearExpr(v);
    }

    auto tag = [](std::initializer_list<std::pair<char, std::int64_t>> parts) {
        std::string out = "/";
        for (const auto& [k, v] : parts) {
            out += (out.size() > 1 ? "," : "") + std::string(1, k) + "=" + std::to_string(v);
        }
        return out;
    };

    for (std::int64_t c = 0; c < C; ++c) {
        SetPartitioning prof;
        for (std::int64_t p = 0; p < P; ++p) {
            prof.members.push_back(a[{c, p}]);
        }
        b.add(std::move(prof), "set2" + tag({{'c', c}}));
    }
    for (std::int64_t c = 0; c < C; ++c) {
        SetPartitioning slot;
        for (std::int64_t s = 0; s < S; ++s) {
            slot.members.push_back(z[{c, s}]);
        }
        b.add(std::move(slot), "set3" + tag({{'c', c}}));
    }
    for (std::int64_t p = 0; p < P; ++p) {
        for (std::int64_t s = 0; s < S; ++s) {
            SetPacking k;
            for (std::int64_t c = 0; c < C; ++c) {
                k.members.push_back(x[{c, p, s}]);
            }
            b.add(std::move(k), "set4" + tag({{'p', p}, {'s', s}}));
        }
    }
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t s = 0; s < S; ++s) {
            SetPacking k;
            for (std::int64_t p = 0; p < P; ++p) {
                k.members.push_back(x[{c, p, s}]);
            }
            b.add(std::move(k), "set5" + tag({{'c', c}, {'s', s}}));
        }
    }
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t p = 0; p < P; ++p) {
            SetPacking k;
            for (std::int64_t s = 0; s < S; ++s) {
                k.members.push_back(x[{c, p, s}]);
            }
            b.add(std::move(k), "set6" + tag({{'c', c}, {'p', p}}));
        }
    }
    for (std::int64_t s = 0; s < S; ++s) {
        SetPacking k;
        for (std::int64_t c = 0; c < C; ++c) {
            k.members.push_back(z[{c, s}]);
        }
        b.add(std::move(k), "set7" + tag({{'s', s}}));
    }
    for (std::int64_t p = 0; p < P; ++p) {
        SetPacking k;
        for (std::int64_t c = 0; c < C; ++c) {
            k.members.push_back(a[{c, p}]);
        }
        b.add(std::move(k), "set8" + tag({{'p', p}}));
    }
    for (std::int64_t p = 0; p < P; ++p) {
        SetPacking k;
        for (std::int64_t c = 0; c < C; ++c) {
            for (std::int64_t s = 0; s < S; ++s) {
                k.members.push_back(x[{c, p, s}]);
            }
        }
        b.add(std::move(k), "set9" + tag({{'p', p}}));
    }
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t p = 0; p < P; ++p) {
            for (std::int64_t s = 0; s < S; ++s) {
                const auto at = tag({{'c', c}, {'p', p}, {'s', s}});
                b.add(IfThen{{x[{c, p, s}]}, {a[{c, p}], z[{c, s}]}}, "set11" + at);
                b.add(IfThen{{x[{c, p, s}]}, {h[p], o[s]}}, "set12" + at);
            }
        }
    }
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t s = 0; s < S; ++s) {
            b.add(IfThen{{z[{c, s}]}, {o[s], r[c]}}, "set13" + tag({{'c', c}, {'s', s}}));
        }
    }
    for (std::int64_t c = 0; c < C; ++c) {
        for (std::int64_t p = 0; p < P; ++p) {
            b.add(IfThen{{a[{c, p}]}, {h[p], r[c]}}, "set15" + tag({{'c', c}, {'p', p}}));
        }
    }
    b.objective(Direction::Maximize, std::move(value));
    return b.take();
}

// Multi-trip routing with time windows on a small integer time grid. Node 0 is
// the depot, customers are 1..N.
Model vrptw(const Scale& sc)
{
    const auto N = sc.at("customers");
    const auto K = sc.at("vehicles");
    const std::int64_t service = 1;
    const std::int64_t max_wait = 2;
    const std::int64_t capacity = 3;
    auto travel = [](std::int64_t i, std::int64_t j) -> std::int64_t { return i == 0 || j == 0 ? 2 : 1; };
    auto opens = [](std::int64_t i) { return i + 1; };
    auto closes = [](std::int64_t i) { return 2 * i + 3; };
    auto load = [](std::int64_t i) { return i <= 2 ? 2 : 1; };
    const std::int64_t horizon = closes(N) + service + travel(N, 0);

    Builder b("vrptw-multitrip");
    std::map<std::pair<std::int64_t, std::int64_t>, VarId> x, v;
    std::vector<VarId> t(static_cast<std::size_t>(N) + 1);
    LinearExpr cost;
    for (std::int64_t i = 0; i <= N; ++i) {
        for (std::int64_t j = 0; j <= N; ++j) {
            if (i != j) {
                x[{i, j}] = b.binary(idx("x", {i, j}));
                cost += Rational(travel(i, j)) * x[{i, j}];
            }
        }
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        for (std::int64_t k = 0; k < K; ++k) {
            v[{i, k}] = b.binary(idx("v", {i, k}));
        }
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        t[i] = b.integer(idx("t", {i}), opens(i), closes(i));
    }
    const VarId total = b.integer("T", 0, horizon);
    const VarId shift = b.integer("D", 0, horizon);
    cost += LinearExpr(shift);

    auto at = [](std::string_view set, std::int64_t i, std::int64_t j) {
        return std::string(set) + "/i=" + std::to_string(i) + ",j=" + std::to_string(j);
    };
    for (std::int64_t i = 1; i <= N; ++i) {
        SetPartitioning next;
        for (std::int64_t j = 0; j <= N; ++j) {
            if (j != i) {
                next.members.push_back(x[{i, j}]);
            }
        }
        b.add(std::move(next), "set1/i=" + std::to_string(i));
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        for (std::int64_t j = 1; j <= N; ++j) {
            if (i != j && opens(i) + service + travel(i, j) > closes(j)) {
                b.add(VariableFix{x[{i, j}], Rational(0)}, at("set2", i, j));
            }
        }
    }
    for (std::int64_t j = 1; j <= N; ++j) {
        SetPartitioning prev;
        for (std::int64_t i = 0; i <= N; ++i) {
            if (i != j) {
                prev.members.push_back(x[{i, j}]);
            }
        }
        b.add(std::move(prev), "set3/j=" + std::to_string(j));
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        SetPartitioning one;
        for (std::int64_t k = 0; k < K; ++k) {
            one.members.push_back(v[{i, k}]);
        }
        b.add(std::move(one), "set4/i=" + std::to_string(i));
    }
    for (std::int64_t n = 0; n <= N; ++n) {
        Balance flow;
        flow.flavor = BalanceFlavor::Flow;
        for (std::int64_t m = 0; m <= N; ++m) {
            if (m != n) {
                flow.lhs += LinearExpr(x[{m, n}]);
                flow.rhs += LinearExpr(x[{n, m}]);
            }
        }
        b.add(std::move(flow), "set5/n=" + std::to_string(n));
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        for (std::int64_t j = 1; j <= N; ++j) {
            if (i == j) {
                continue;
            }
            const Rational gap(service + travel(i, j));
            b.add(conditional(t[j], Sense::GE, LinearExpr(t[i]) + LinearExpr(gap), x[{i, j}], OffBehavior::Free),
                at("set6", i, j));
            b.add(conditional(t[j], Sense::LE, LinearExpr(t[i]) + LinearExpr(gap + Rational(max_wait)), x[{i, j}],
                      OffBehavior::Free),
                at("set7", i, j));
        }
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        b.add(conditional(total, Sense::GE, LinearExpr(t[i]) + LinearExpr(Rational(service + travel(i, 0))), x[{i, 0}],
                  OffBehavior::Free),
            "set8/i=" + std::to_string(i));
    }
    for (std::int64_t i = 1; i <= N; ++i) {
        for (std::int64_t j = i + 1; j <= N; ++j) {
            if (load(i) + load(j) <= capacity) {
                continue;
            }
            for (std::int64_t k = 0; k < K; ++k) {
                b.add(SetPacking{{v[{i, k}], v[{j, k}]}, std::nullopt, 1},
                    "set9/i=" + std::to_string(i) + ",j=" + std::to_string(j) + ",k=" + std::to_string(k));
            }
        }
    }
    b.add(Bound{total, Sense::LE, LinearExpr(shift)}, "set10/shift");
    b.objective(Direction::Minimize, std::move(cost));
    return b.take();
}

struct CaseEntry {
    CaseStudy info;
    NodeMap expected;
    Model (*build)(const Scale&);
};

const std::vector<CaseEntry>& entries()
{
    static const std::vector<CaseEntry> all = {
        {{"chemical-scheduling", "batch scheduling of tasks on processing units with storage",
             {{"units", 1, 2, 2}, {"tasks", 1, 2, 3}, {"periods", 1, 3, 4}}, {}},
            {{"set1", {11}}, {"set2", {3, 9}}, {"set3a", {14}}, {"set3b", {7}}}, chemical},
        {{"supply-chain-planning", "multi-period production, stock and workforce planning",
             {{"products", 1, 2, 3}, {"periods", 2, 2, 4}}, {}},
            {{"set1", {12}}, {"set2", {13}}, {"set3", {2, 8}}, {"set4", {3, 9}}, {"set5", {13}}, {"set6", {2, 8}}},
            supply_chain},
        {{"course-timetabling", "assigning courses to professors and time slots",
             {{"courses", 1, 2, 3}, {"professors", 1, 2, 3}, {"slots", 1, 2, 3}}, {"set1", "set10", "set14"}},
            {{"set2", {17}}, {"set3", {17}}, {"set4", {11}}, {"set5", {11}}, {"set6", {11}}, {"set7", {11}},
                {"set8", {11}}, {"set9", {11}}, {"set11", {24}}, {"set12", {24}}, {"set13", {24}}, {"set15", {24}}},
            timetabling},
        {{"vrptw-multitrip", "multi-trip vehicle routing with customer time windows",
             {{"customers", 3, 3, 4}, {"vehicles", 2, 2, 3}}, {}},
            {{"set1", {17}}, {"set2", {19}}, {"set3", {17}}, {"set4", {17}}, {"set5", {14}}, {"set6", {9}},
                {"set7", {3}}, {"set8", {9}}, {"set9", {11}}, {"set10", {2}}},
            vrptw},
    };
    return all;
}

const CaseEntry& entry(std::string_view id)
{
    for (const auto& e : entries()) {
        if (e.info.id == id) {
            return e;
        }
    }
    throw Error(ErrorCode::UnknownCase, "no case study named '" + std::string(id) + "'", std::string(id));
}

} // namespace

const std::vector<CaseStudy>& list_cases()
{
    static const std::vector<CaseStudy> cases = [] {
        std::vector<CaseStudy> out;
        for (const auto& e : entries()) {
            out.push_back(e.info);
        }
        return out;
    }();
    return cases;
}

const CaseStudy& find_case(std::string_view id)
{
    return entry(id).info;
}

Scale default_scale(std::string_view id)
{
    Scale out;
    for (const auto& p : entry(id).info.scale) {
        out[p.name] = p.default_value;
    }
    return out;
}

Model build_case(std::string_view id, const Scale& scale)
{
    const CaseEntry& e = entry(id);
    Scale full = default_scale(id);
    for (const auto& [name, value] : scale) {
        if (!full.contains(name)) {
            throw Error(ErrorCode::BadParams, "case '" + e.info.id + "' has no scale parameter '" + name + "'", name);
        }
        full[name] = value;
    }
    for (const auto& p : e.info.scale) {
        const auto value = full[p.name];
        if (value < p.minimum) {
            throw Error(ErrorCode::BadParams,
                p.name + " = " + std::to_string(value) + " is below the minimum of " + std::to_string(p.minimum), p.name);
        }
        if (value > p.maximum) {
            throw Error(ErrorCode::ScaleTooLarge,
                p.name + " = " + std::to_string(value) + " exceeds the desk-scale limit of " + std::to_string(p.maximum),
                p.name);
        }
    }
    return e.build(full);
}

const NodeMap& expected_node_map(std::string_view id)
{
    return entry(id).expected;
}

std::string set_label(std::string_view constraint_label)
{
    return std::string(constraint_label.substr(0, constraint_label.find('/')));
}

NodeMap observed_node_map(const Model& model)
{
    NodeMap out;
    for (const auto& c : model.constraints()) {
        out[set_label(c.label)].insert(classify(c));
    }
    return out;
}

LowerOptions default_lower_options(std::string_view id)
{
    LowerOptions options;
    if (entry(id).info.id == "course-timetabling") {
        options.if_then_strength = IfThenStrength::Weak;
    }
    return options;
}

nlohmann::json node_map_to_json(std::string_view id)
{
    const CaseEntry& e = entry(id);
    nlohmann::json sets = nlohmann::json::object();
    for (const auto& [label, nodes] : e.expected) {
        sets[label] = std::vector<int>(nodes.begin(), nodes.end());
    }
    return {{"case", e.info.id}, {"sets", sets}, {"omitted", e.info.omitted_sets}};
}

} // namespace omtk
