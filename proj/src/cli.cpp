#include "omtk/cli.hpp"

#include "omtk/corpus.hpp"
#include "omtk/emit.hpp"
#include "omtk/error.hpp"
#include "omtk/lowering.hpp"
#include "omtk/model_json.hpp"
#include "omtk/omt_tree.hpp"
#include "omtk/oracle.hpp"
#include "omtk/reports.hpp"
#include "omtk/service.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace omtk {

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read '" + path + "'", path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << text)) {
        throw Error(ErrorCode::IoError, "cannot write '" + path + "'", path);
    }
}

IfThenStrength strength(const std::string& text)
{
    return parse_if_then_strength(text).value_or(IfThenStrength::Strong);
}

std::string tree_text(const OmtTree& tree)
{
    std::ostringstream out;
    for (const auto& [id, node] : tree.nodes()) {
        out << "[" << id << "] " << node.label << (node.anchored ? " *" : "") << "\n";
        if (node.is_leaf()) {
            const auto& spec = *node.template_spec;
            out << "    template " << to_string(spec.family) << "(";
            for (std::size_t k = 0; k < spec.slots.size(); ++k) {
                out << (k ? ", " : "") << spec.slots[k].name << ": " << to_string(spec.slots[k].kind);
            }
            out << ")";
            for (const auto& [key, value] : spec.fixed) {
                out << " " << key << "=" << value;
            }
            out << "\n";
        } else {
            out << "    " << node.question << "\n";
            for (const auto& c : node.children) {
                out << "      - " << c.answer << " -> " << c.child << "\n";
            }
        }
    }
    return out.str();
}

Scale parse_scale(const std::vector<std::string>& items)
{
    Scale out;
    for (const auto& item : items) {
        auto eq = item.find('=');
        auto value = eq == std::string::npos ? std::nullopt : Rational::parse(std::string_view(item).substr(eq + 1));
        if (!value || !value->is_integer()) {
            throw Error(ErrorCode::BadParams, "scale entries look like name=integer, got '" + item + "'", item);
        }
        out[item.substr(0, eq)] = value->num();
    }
    return out;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Typed MILP constraint toolkit: compile, solve, check and browse the modelling tree", "omtk"};
    app.require_subcommand(1);
    bool json_output = false;
    app.add_flag("--json", json_output, "machine-readable output")->configurable(false);
    app.fallthrough();

    std::string model_path;
    std::string format = "lp";
    std::string if_then = "strong";
    std::string output;
    auto* compile = app.add_subcommand("compile", "lower a ModelDocument to LP or MPS text");
    compile->add_option("model", model_path, "ModelDocument JSON file")->required();
    compile->add_option("--format", format, "output format")->check(CLI::IsMember({"lp", "mps"}));
    compile->add_option("--if-then", if_then, "if-then linearization")->check(CLI::IsMember({"weak", "strong"}));
    compile->add_option("-o,--output", output, "output file (default stdout)");

    std::uint64_t max_points = EnumerationLimits{}.max_points;
    auto* solve = app.add_subcommand("solve", "optimum by exhaustive enumeration");
    solve->add_option("model", model_path, "ModelDocument JSON file")->required();
    solve->add_option("--max-points", max_points, "largest box to enumerate");

    std::uint64_t box_cap = CheckLimits{}.cap;
    int interior = 0;
    auto* check = app.add_subcommand("check", "compare every constraint with its lowering over its box");
    check->add_option("model", model_path, "ModelDocument JSON file")->required();
    check->add_option("--box-cap", box_cap, "points x 2^auxiliaries limit per constraint");
    check->add_option("--interior", interior, "extra interior samples for continuous variables")->check(CLI::NonNegativeNumber);
    check->add_option("--if-then", if_then, "if-then linearization")->check(CLI::IsMember({"weak", "strong"}));

    auto* tree = app.add_subcommand("tree", "print the modelling tree");

    auto* corpus = app.add_subcommand("corpus", "case-study models");
    corpus->require_subcommand(1);
    std::string case_id;
    std::vector<std::string> scale_items;
    auto* build = corpus->add_subcommand("build", "write a case study as a ModelDocument");
    build->add_option("case", case_id, "case id")->required();
    build->add_option("--scale", scale_items, "scale parameters, name=value")->delimiter(',');
    build->add_option("-o,--output", output, "output file (default stdout)");
    auto* node_map = corpus->add_subcommand("node-map", "print a case's expected set-to-node map");
    node_map->add_option("case", case_id, "case id")->required();
    auto* verify = corpus->add_subcommand("verify", "check every case's constraint sets against its node map");
    auto* list = corpus->add_subcommand("list", "list case studies and their scale parameters");

    int port = 8080;
    std::string host = "127.0.0.1";
    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
    serve_cmd->add_option("--port", port, "port (default $PORT or 8080)")->check(CLI::Range(1, 65535));
    serve_cmd->add_option("--host", host, "interface to bind");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) {
            failing = sub;
            for (auto* inner : sub->get_subcommands()) {
                failing = inner;
            }
        }
        err << failing->help();
        return kExitUsage;
    }

    try {
        if (compile->parsed()) {
            Model model = parse_model(read_file(model_path));
            LowerOptions options;
            options.if_then_strength = strength(if_then);
            CanonicalForm form = lower_model(model, options);
            write_output(output, format == "lp" ? emit_lp(form) : emit_mps(form), out);
            return kExitOk;
        }
        if (solve->parsed()) {
            Model model = parse_model(read_file(model_path));
            OptimumReport report = solve_by_enumeration(model, EnumerationLimits{max_points});
            if (json_output) {
                out << to_json(report, model.variables()).dump(2) << "\n";
            } else {
                out << "status: " << to_string(report.status) << "\n";
                if (report.status == SolveStatus::Optimal) {
                    out << "value: " << report.objective_value << "\n";
                    for (const auto& v : model.variables()) {
                        out << "  " << v.name << " = " << report.witness.at(v.id) << "\n";
                    }
                }
                out << "points: " << report.points_enumerated << "\n";
            }
            return kExitOk;
        }
        if (check->parsed()) {
            Model model = parse_model(read_file(model_path));
            LowerOptions options;
            options.if_then_strength = strength(if_then);
            CheckLimits limits;
            limits.cap = box_cap;
            ModelCheckReport report = check_model(model, options, limits, BoxOptions{interior});
            if (json_output) {
                out << to_json(report, model.variables()).dump(2) << "\n";
            } else {
                for (const auto& c : report.constraints) {
                    out << (c.report.equivalent() ? "ok   " : "FAIL ") << "c" << c.id.value << " " << c.label << " ("
                        << c.report.points_checked << " points, " << c.report.mismatch_count << " mismatches)\n";
                }
                out << report.points_checked() << " points checked, " << report.mismatch_count() << " mismatches\n";
            }
            return report.mismatch_count() == 0 ? kExitOk : kExitDomain;
        }
        if (tree->parsed()) {
            out << (json_output ? std::string(builtin_tree_document()) : tree_text(load_tree()));
            return kExitOk;
        }
        if (build->parsed()) {
            write_output(output, write_model(build_case(case_id, parse_scale(scale_items))), out);
            return kExitOk;
        }
        if (node_map->parsed()) {
            out << node_map_to_json(case_id).dump(2) << "\n";
            return kExitOk;
        }
        if (list->parsed()) {
            nlohmann::json cases = nlohmann::json::array();
            for (const auto& c : list_cases()) {
                nlohmann::json scale = nlohmann::json::array();
                for (const auto& p : c.scale) {
                    scale.push_back({{"name", p.name}, {"min", p.minimum}, {"default", p.default_value}, {"max", p.maximum}});
                    if (!json_output) {
                        out << (p.name == c.scale.front().name ? c.id + ":" : std::string()) << " " << p.name << "="
                            << p.default_value << " [" << p.minimum << ".." << p.maximum << "]";
                    }
                }
                if (!json_output) {
                    out << "\n";
                }
                cases.push_back({{"id", c.id}, {"description", c.description}, {"scale", scale}});
            }
            if (json_output) {
                out << cases.dump(2) << "\n";
            }
            return kExitOk;
        }
        if (verify->parsed()) {
            bool all = true;
            nlohmann::json results = nlohmann::json::array();
            for (const auto& c : list_cases()) {
                Model model = build_case(c.id);
                bool tags = std::all_of(model.constraints().begin(), model.constraints().end(),
                    [](const TypedConstraint& tc) { return tc.omt_node == classify(tc); });
                bool ok = tags && observed_node_map(model) == expected_node_map(c.id);
                all = all && ok;
                results.push_back({{"case", c.id}, {"ok", ok}, {"constraints", model.constraints().size()}});
                if (!json_output) {
                    out << (ok ? "ok   " : "FAIL ") << c.id << " (" << model.constraints().size() << " constraints)\n";
                }
            }
            if (json_output) {
                out << nlohmann::json{{"ok", all}, {"cases", results}}.dump(2) << "\n";
            }
            return all ? kExitOk : kExitDomain;
        }
        if (serve_cmd->parsed()) {
            if (serve_cmd->count("--port") == 0) {
                if (const char* env = std::getenv("PORT")) {
                    port = std::atoi(env);
                }
            }
            err << "listening on http://" << host << ":" << port << "/api/v1\n";
            if (!serve(host, port)) {
                throw Error(ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
            }
            return kExitOk;
        }
    } catch (const Error& e) {
        if (json_output) {
            err << error_envelope(e.code_name(), e.what(), e.subject()).dump() << "\n";
        } else {
            err << "error: " << e.code_name() << ": " << e.what() << "\n";
        }
        return kExitDomain;
    }
    return kExitUsage;
}

} // namespace omtk
