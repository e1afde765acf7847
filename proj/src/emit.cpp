#include "omtk/emit.hpp"

#include "omtk/error.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <unordered_map>

namespace omtk {

namespace {

std::string decimal(const Rational& value, const std::string& where)
{
    auto text = value.to_decimal(15);
    if (!text) {
        throw Error(ErrorCode::NonDecimalCoefficient,
            where + ": " + value.to_string() + " has no terminating decimal form within 15 significant digits", where);
    }
    return *text;
}

const std::string& var_name(const CanonicalForm& form, VarId id)
{
    return form.variables.at(id.value).name;
}

/// "x1 + 2 x2 - x3 + 5"; "0" when empty.
std::string linear_text(const CanonicalForm& form, const std::map<VarId, Rational>& terms, const Rational& constant,
    const std::string& where)
{
    std::string out;
    bool first = true;
    auto append = [&](const Rational& coef, const std::string* name) {
        bool negative = coef.sign() < 0;
        Rational magnitude = negative ? -coef : coef;
        if (first) {
            out += negative ? "- " : "";
        } else {
            out += negative ? " - " : " + ";
        }
        if (name == nullptr) {
            out += decimal(magnitude, where);
        } else {
            if (magnitude != Rational(1)) {
                out += decimal(magnitude, where) + " ";
            }
            out += *name;
        }
        first = false;
    };
    for (const auto& [var, coef] : terms) {
        append(coef, &var_name(form, var));
    }
    if (!constant.is_zero()) {
        append(constant, nullptr);
    }
    return first ? "0" : out;
}

std::string_view lp_operator(Sense sense)
{
    switch (sense) {
    case Sense::LE: return "<=";
    case Sense::EQ: return "=";
    case Sense::GE: return ">=";
    }
    return "?";
}

std::string provenance(std::size_t k, const CanonicalRow& row)
{
    return "c" + std::to_string(k) + " source=" + std::to_string(row.source.value) +
           " node=" + (row.omt_node ? std::to_string(*row.omt_node) : std::string("-")) + " label=" + row.label;
}

} // namespace

std::string emit_lp(const CanonicalForm& form)
{
    std::ostringstream out;
    out << (form.objective.direction == Direction::Maximize ? "Maximize\n" : "Minimize\n");
    out << "\\ problem: " << form.name << "\n";
    out << " obj: " << linear_text(form, form.objective.expr.terms(), form.objective.expr.constant(), "objective")
        << "\n";
    out << "Subject To\n";
    for (std::size_t k = 0; k < form.rows.size(); ++k) {
        const auto& row = form.rows[k];
        const std::string name = "c" + std::to_string(k);
        out << "\\ " << provenance(k, row) << "\n";
        out << " " << name << ": " << linear_text(form, row.coefficients, Rational(0), name) << " "
            << lp_operator(row.sense) << " " << decimal(row.rhs, name) << "\n";
    }
    out << "Bounds\n";
    for (const auto& v : form.variables) {
        if (v.lower && v.upper) {
            out << " " << decimal(*v.lower, v.name) << " <= " << v.name << " <= " << decimal(*v.upper, v.name) << "\n";
        } else if (v.lower) {
            out << " " << v.name << " >= " << decimal(*v.lower, v.name) << "\n";
        } else if (v.upper) {
            out << " -inf <= " << v.name << " <= " << decimal(*v.upper, v.name) << "\n";
        } else {
            out << " " << v.name << " free\n";
        }
    }
    auto list_kind = [&](VarKind kind, std::string_view header) {
        bool any = std::any_of(form.variables.begin(), form.variables.end(), [&](const auto& v) { return v.kind == kind; });
        if (!any) {
            return;
        }
        out << header << "\n";
        for (const auto& v : form.variables) {
            if (v.kind == kind) {
                out << " " << v.name << "\n";
            }
        }
    };
    list_kind(VarKind::Integer, "Generals");
    list_kind(VarKind::Binary, "Binaries");
    out << "End\n";
    return out.str();
}

std::string emit_mps(const CanonicalForm& form)
{
    std::ostringstream out;
    out << "NAME" << (form.name.empty() ? "" : " " + form.name) << "\n";
    for (std::size_t k = 0; k < form.rows.size(); ++k) {
        out << "* " << provenance(k, form.rows[k]) << "\n";
    }
    out << "OBJSENSE\n    " << (form.objective.direction == Direction::Maximize ? "MAX" : "MIN") << "\n";
    out << "ROWS\n N obj\n";
    for (std::size_t k = 0; k < form.rows.size(); ++k) {
        char type = form.rows[k].sense == Sense::LE ? 'L' : form.rows[k].sense == Sense::GE ? 'G' : 'E';
        out << " " << type << " c" << k << "\n";
    }

    // Column-major view of the rows.
    std::vector<std::vector<std::pair<std::size_t, Rational>>> columns(form.variables.size());
    for (std::size_t k = 0; k < form.rows.size(); ++k) {
        for (const auto& [var, coef] : form.rows[k].coefficients) {
            columns.at(var.value).emplace_back(k, coef);
        }
    }
    out << "COLUMNS\n";
    bool in_marker = false;
    for (std::size_t j = 0; j < form.variables.size(); ++j) {
        const auto& v = form.variables[j];
        bool integral = v.kind != VarKind::Continuous;
        if (integral != in_marker) {
            out << " MARKER 'MARKER' " << (integral ? "'INTORG'" : "'INTEND'") << "\n";
            in_marker = integral;
        }
        Rational obj = form.objective.expr.coefficient(VarId{static_cast<std::uint32_t>(j)});
        bool wrote = false;
        if (!obj.is_zero()) {
            out << " " << v.name << " obj " << decimal(obj, "objective") << "\n";
            wrote = true;
        }
        for (const auto& [k, coef] : columns[j]) {
            std::string row = "c" + std::to_string(k);
            out << " " << v.name << " " << row << " " << decimal(coef, row) << "\n";
            wrote = true;
        }
        if (!wrote) {
            out << " " << v.name << " obj 0\n";
        }
    }
    if (in_marker) {
        out << " MARKER 'MARKER' 'INTEND'\n";
    }
    out << "RHS\n";
    if (!form.objective.expr.constant().is_zero()) {
        out << " RHS obj " << decimal(-form.objective.expr.constant(), "objective") << "\n";
    }
    for (std::size_t k = 0; k < form.rows.size(); ++k) {
        if (!form.rows[k].rhs.is_zero()) {
            std::string row = "c" + std::to_string(k);
            out << " RHS " << row << " " << decimal(form.rows[k].rhs, row) << "\n";
        }
    }
    out << "BOUNDS\n";
    for (const auto& v : form.variables) {
        if (v.kind == VarKind::Binary) {
            out << " BV BND " << v.name << "\n";
        } else if (!v.lower && !v.upper) {
            out << " FR BND " << v.name << "\n";
        } else {
            if (v.lower) {
                out << " LO BND " << v.name << " " << decimal(*v.lower, v.name) << "\n";
            } else {
                out << " MI BND " << v.name << "\n";
            }
            if (v.upper) {
                out << " UP BND " << v.name << " " << decimal(*v.upper, v.name) << "\n";
            } else {
                out << " PL BND " << v.name << "\n";
            }
        }
    }
    out << "ENDATA\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

struct Line {
    std::size_t number = 0;
    std::string text;
};

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> lines;
    std::size_t number = 1;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back({number++, std::move(line)});
        start = end + 1;
    }
    return lines;
}

[[noreturn]] void parse_error(std::size_t line, std::size_t column, const std::string& what)
{
    throw Error(ErrorCode::ParseError,
        "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what,
        std::to_string(line) + ":" + std::to_string(column));
}

[[noreturn]] void unsupported(std::size_t line, const std::string& what)
{
    throw Error(ErrorCode::UnsupportedDialect, "line " + std::to_string(line) + ": " + what, std::to_string(line));
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

struct Token {
    enum class Kind { Name, Number, Sign, Op, Colon } kind;
    std::string text;
    std::size_t column;
};

std::vector<Token> tokenize(const Line& line)
{
    std::vector<Token> out;
    const std::string& s = line.text;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        std::size_t col = i + 1;
        if (c == '+' || c == '-') {
            out.push_back({Token::Kind::Sign, std::string(1, c), col});
            ++i;
        } else if (c == '<' || c == '>' || c == '=') {
            std::string op(1, c);
            if (i + 1 < s.size() && (s[i + 1] == '=' || s[i + 1] == '<' || s[i + 1] == '>')) {
                op.push_back(s[i + 1]);
            }
            i += op.size();
            out.push_back({Token::Kind::Op, op, col});
        } else if (c == ':') {
            out.push_back({Token::Kind::Colon, ":", col});
            ++i;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) {
                ++j;
            }
            out.push_back({Token::Kind::Number, s.substr(i, j - i), col});
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '.' ||
                                       s[j] == '[' || s[j] == ']')) {
                ++j;
            }
            out.push_back({Token::Kind::Name, s.substr(i, j - i), col});
            i = j;
        } else {
            parse_error(line.number, col, std::string("unexpected character '") + c + "'");
        }
    }
    return out;
}

Rational number_value(const Token& t, std::size_t line)
{
    auto r = Rational::parse(t.text);
    if (!r) {
        parse_error(line, t.column, "malformed number '" + t.text + "'");
    }
    return *r;
}

std::optional<Sense> sense_of(std::string_view op)
{
    if (op == "<=" || op == "=<" || op == "<") return Sense::LE;
    if (op == ">=" || op == "=>" || op == ">") return Sense::GE;
    if (op == "=") return Sense::EQ;
    return std::nullopt;
}

struct ParsedExpr {
    std::vector<std::pair<std::string, Rational>> terms;
    Rational constant;
};

/// Reads a signed sum of terms starting at `pos`; stops at an operator or end.
ParsedExpr parse_expr(const std::vector<Token>& tokens, std::size_t& pos, const Line& line)
{
    ParsedExpr e;
    bool first = true;
    while (pos < tokens.size() && tokens[pos].kind != Token::Kind::Op) {
        int sign = 1;
        bool saw_sign = false;
        while (pos < tokens.size() && tokens[pos].kind == Token::Kind::Sign) {
            if (tokens[pos].text == "-") {
                sign = -sign;
            }
            saw_sign = true;
            ++pos;
        }
        if (!first && !saw_sign) {
            parse_error(line.number, pos < tokens.size() ? tokens[pos].column : line.text.size() + 1,
                "expected '+' or '-' between terms");
        }
        std::optional<Rational> coef;
        if (pos < tokens.size() && tokens[pos].kind == Token::Kind::Number) {
            coef = number_value(tokens[pos], line.number);
            ++pos;
        }
        if (pos < tokens.size() && tokens[pos].kind == Token::Kind::Name) {
            e.terms.emplace_back(tokens[pos].text, Rational(sign) * coef.value_or(Rational(1)));
            ++pos;
        } else if (coef) {
            e.constant += Rational(sign) * *coef;
        } else {
            parse_error(line.number, pos < tokens.size() ? tokens[pos].column : line.text.size() + 1,
                "expected a coefficient or variable");
        }
        first = false;
    }
    return e;
}

struct PendingRow {
    std::string name;
    std::vector<std::pair<std::string, Rational>> terms;
    Sense sense = Sense::LE;
    Rational rhs;
    std::size_t line = 0;
};

struct Provenance {
    ConstraintId source;
    std::optional<int> omt_node;
    std::string label;
};

/// Parses "c<k> source=<s> node=<n|-> label=<rest of line>".
std::optional<std::pair<std::string, Provenance>> parse_provenance(std::string_view text)
{
    auto sp = text.find(" source=");
    auto np = text.find(" node=");
    auto lp = text.find(" label=");
    if (sp == std::string_view::npos || np == std::string_view::npos || lp == std::string_view::npos || !(sp < np && np < lp)) {
        return std::nullopt;
    }
    std::string name(text.substr(0, sp));
    auto source = Rational::parse(text.substr(sp + 8, np - sp - 8));
    std::string_view node = text.substr(np + 6, lp - np - 6);
    if (!source || !source->is_integer() || source->sign() < 0) {
        return std::nullopt;
    }
    Provenance p;
    p.source = ConstraintId{static_cast<std::uint32_t>(source->num())};
    if (node != "-") {
        auto n = Rational::parse(node);
        if (!n || !n->is_integer()) {
            return std::nullopt;
        }
        p.omt_node = static_cast<int>(n->num());
    }
    p.label = std::string(text.substr(lp + 7));
    return std::pair{name, p};
}

class FormBuilder {
public:
    void declare(const std::string& name, std::size_t line)
    {
        if (index_.contains(name)) {
            parse_error(line, 1, "variable '" + name + "' declared twice");
        }
        index_.emplace(name, form_.variables.size());
        form_.variables.push_back(CanonicalVariable{name, VarKind::Continuous, Rational(0), std::nullopt});
    }

    bool declared(const std::string& name) const { return index_.contains(name); }

    CanonicalVariable& variable(const std::string& name, std::size_t line)
    {
        auto it = index_.find(name);
        if (it == index_.end()) {
            unsupported(line, "variable '" + name + "' has no bounds declaration");
        }
        return form_.variables[it->second];
    }

    VarId id(const std::string& name, std::size_t line)
    {
        auto it = index_.find(name);
        if (it == index_.end()) {
            unsupported(line, "variable '" + name + "' has no bounds declaration");
        }
        return VarId{static_cast<std::uint32_t>(it->second)};
    }

    CanonicalForm& form() { return form_; }

    void finish_rows(std::vector<PendingRow>& rows, const std::map<std::string, Provenance>& provenance)
    {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            auto& pending = rows[k];
            CanonicalRow row;
            for (const auto& [name, coef] : pending.terms) {
                VarId v = id(name, pending.line);
                auto [it, inserted] = row.coefficients.try_emplace(v, coef);
                if (!inserted) {
                    it->second += coef;
                }
            }
            std::erase_if(row.coefficients, [](const auto& kv) { return kv.second.is_zero(); });
            row.sense = pending.sense;
            row.rhs = pending.rhs;
            if (auto it = provenance.find(pending.name); it != provenance.end()) {
                row.source = it->second.source;
                row.omt_node = it->second.omt_node;
                row.label = it->second.label;
            } else {
                row.source = ConstraintId{static_cast<std::uint32_t>(k)};
            }
            form_.rows.push_back(std::move(row));
        }
    }

private:
    CanonicalForm form_;
    std::unordered_map<std::string, std::size_t> index_;
};

enum class LpSection { None, Objective, Constraints, Bounds, Generals, Binaries, End };

std::optional<LpSection> lp_section(const std::string& trimmed, std::size_t line, Direction& direction)
{
    std::string key = lower(trimmed);
    if (key == "maximize" || key == "maximise" || key == "maximum" || key == "max") {
        direction = Direction::Maximize;
        return LpSection::Objective;
    }
    if (key == "minimize" || key == "minimise" || key == "minimum" || key == "min") {
        direction = Direction::Minimize;
        return LpSection::Objective;
    }
    if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") return LpSection::Constraints;
    if (key == "bounds" || key == "bound") return LpSection::Bounds;
    if (key == "generals" || key == "general" || key == "gen") return LpSection::Generals;
    if (key == "binaries" || key == "binary" || key == "bin") return LpSection::Binaries;
    if (key == "end") return LpSection::End;
    for (std::string_view other : {"semi-continuous", "semis", "semi", "sos", "lazy constraints", "user cuts",
             "general constraints", "pwlobj", "declarations"}) {
        if (key == other) {
            unsupported(line, "section '" + trimmed + "' is outside the supported LP subset");
        }
    }
    return std::nullopt;
}

std::optional<Rational> bound_value(const std::vector<Token>& tokens, std::size_t& pos, const Line& line,
    bool& infinite)
{
    int sign = 1;
    while (pos < tokens.size() && tokens[pos].kind == Token::Kind::Sign) {
        sign = tokens[pos].text == "-" ? -sign : sign;
        ++pos;
    }
    if (pos >= tokens.size()) {
        parse_error(line.number, line.text.size() + 1, "expected a bound value");
    }
    const Token& t = tokens[pos++];
    if (t.kind == Token::Kind::Name && (lower(t.text) == "inf" || lower(t.text) == "infinity")) {
        infinite = true;
        return sign > 0 ? std::optional<Rational>(Rational(1)) : std::optional<Rational>(Rational(-1));
    }
    if (t.kind != Token::Kind::Number) {
        parse_error(line.number, t.column, "expected a bound value");
    }
    infinite = false;
    return Rational(sign) * number_value(t, line.number);
}

void parse_bound_line(FormBuilder& b, const Line& line)
{
    auto tokens = tokenize(line);
    if (tokens.size() == 2 && tokens[0].kind == Token::Kind::Name && lower(tokens[1].text) == "free") {
        b.declare(tokens[0].text, line.number);
        auto& v = b.variable(tokens[0].text, line.number);
        v.lower.reset();
        v.upper.reset();
        return;
    }
    auto apply = [&](CanonicalVariable& v, Sense sense, const Rational& value, bool infinite) {
        bool positive = value.sign() > 0;
        if (sense == Sense::LE) {
            v.upper = infinite ? std::nullopt : std::optional<Rational>(value);
            if (infinite && !positive) {
                parse_error(line.number, 1, "upper bound of -inf");
            }
        } else if (sense == Sense::GE) {
            v.lower = infinite ? std::nullopt : std::optional<Rational>(value);
            if (infinite && positive) {
                parse_error(line.number, 1, "lower bound of +inf");
            }
        } else {
            v.lower = value;
            v.upper = value;
        }
    };
    std::size_t pos = 0;
    if (!tokens.empty() && tokens[0].kind == Token::Kind::Name && lower(tokens[0].text) != "inf" &&
        lower(tokens[0].text) != "infinity") {
        // name op value
        const std::string name = tokens[0].text;
        pos = 1;
        if (pos >= tokens.size() || tokens[pos].kind != Token::Kind::Op) {
            parse_error(line.number, pos < tokens.size() ? tokens[pos].column : line.text.size() + 1, "expected a comparison");
        }
        Sense s = *sense_of(tokens[pos++].text);
        bool infinite = false;
        auto value = bound_value(tokens, pos, line, infinite);
        if (pos != tokens.size()) {
            parse_error(line.number, tokens[pos].column, "trailing input in bound");
        }
        b.declare(name, line.number);
        apply(b.variable(name, line.number), s, *value, infinite);
        return;
    }
    // value op name [op value]
    bool lo_inf = false;
    auto lo = bound_value(tokens, pos, line, lo_inf);
    if (pos >= tokens.size() || tokens[pos].kind != Token::Kind::Op) {
        parse_error(line.number, pos < tokens.size() ? tokens[pos].column : line.text.size() + 1, "expected a comparison");
    }
    Sense first = *sense_of(tokens[pos++].text);
    if (pos >= tokens.size() || tokens[pos].kind != Token::Kind::Name) {
        parse_error(line.number, pos < tokens.size() ? tokens[pos].column : line.text.size() + 1, "expected a variable");
    }
    const std::string name = tokens[pos++].text;
    b.declare(name, line.number);
    auto& v = b.variable(name, line.number);
    // "a <= x" is x >= a
    Sense flipped = first == Sense::LE ? Sense::GE : first == Sense::GE ? Sense::LE : Sense::EQ;
    apply(v, flipped, *lo, lo_inf);
    if (pos < tokens.size()) {
        if (tokens[pos].kind != Token::Kind::Op) {
            parse_error(line.number, tokens[pos].column, "expected a comparison");
        }
        Sense second = *sense_of(tokens[pos++].text);
        bool hi_inf = false;
        auto hi = bound_value(tokens, pos, line, hi_inf);
        if (pos != tokens.size()) {
            parse_error(line.number, tokens[pos].column, "trailing input in bound");
        }
        apply(v, second, *hi, hi_inf);
    }
}

} // namespace

CanonicalForm parse_lp(std::string_view text)
{
    FormBuilder b;
    std::vector<PendingRow> rows;
    std::map<std::string, Provenance> provenance;
    std::optional<ParsedExpr> objective;
    std::size_t objective_line = 0;
    std::vector<std::pair<std::string, std::size_t>> generals;
    std::vector<std::pair<std::string, std::size_t>> binaries;
    Direction direction = Direction::Minimize;
    LpSection section = LpSection::None;

    auto lines = split_lines(text);
    for (const auto& line : lines) {
        std::string t = trim(line.text);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '\\') {
            std::string body = trim(std::string_view(t).substr(1));
            if (body.starts_with("problem:")) {
                b.form().name = trim(std::string_view(body).substr(8));
            } else if (auto p = parse_provenance(std::string_view(line.text).substr(line.text.find('\\') + 2))) {
                provenance[p->first] = p->second;
            }
            continue;
        }
        if (auto s = lp_section(t, line.number, direction)) {
            if (*s == LpSection::Objective && section != LpSection::None) {
                parse_error(line.number, 1, "objective section must come first");
            }
            if (*s != LpSection::Objective && section == LpSection::None) {
                parse_error(line.number, 1, "file must start with Maximize or Minimize");
            }
            section = *s;
            if (section == LpSection::End) {
                break;
            }
            continue;
        }
        Line stripped{line.number, line.text};
        switch (section) {
        case LpSection::None: parse_error(line.number, 1, "file must start with Maximize or Minimize");
        case LpSection::Objective: {
            if (objective) {
                unsupported(line.number, "objective spans several lines");
            }
            auto tokens = tokenize(stripped);
            std::size_t pos = 0;
            if (tokens.size() >= 2 && tokens[0].kind == Token::Kind::Name && tokens[1].kind == Token::Kind::Colon) {
                pos = 2;
            }
            objective = parse_expr(tokens, pos, stripped);
            objective_line = line.number;
            if (pos != tokens.size()) {
                parse_error(line.number, tokens[pos].column, "unexpected comparison in objective");
            }
            break;
        }
        case LpSection::Constraints: {
            auto tokens = tokenize(stripped);
            if (tokens.size() < 2 || tokens[0].kind != Token::Kind::Name || tokens[1].kind != Token::Kind::Colon) {
                parse_error(line.number, tokens.empty() ? 1 : tokens[0].column, "expected a named row 'name: ...'");
            }
            std::size_t ops = std::count_if(tokens.begin(), tokens.end(), [](const Token& tk) { return tk.kind == Token::Kind::Op; });
            if (ops > 1) {
                unsupported(line.number, "ranged rows are not supported");
            }
            std::size_t pos = 2;
            ParsedExpr lhs = parse_expr(tokens, pos, stripped);
            if (pos >= tokens.size()) {
                parse_error(line.number, line.text.size() + 1, "row has no comparison");
            }
            auto sense = sense_of(tokens[pos].text);
            if (!sense) {
                unsupported(line.number, "operator '" + tokens[pos].text + "' is not supported");
            }
            ++pos;
            ParsedExpr rhs = parse_expr(tokens, pos, stripped);
            if (!rhs.terms.empty()) {
                unsupported(line.number, "variables on the right-hand side");
            }
            if (!lhs.constant.is_zero() || (lhs.terms.empty() && tokens.size() == 4 && false)) {
                unsupported(line.number, "constant terms on the left-hand side");
            }
            rows.push_back({tokens[0].text, std::move(lhs.terms), *sense, rhs.constant, line.number});
            break;
        }
        case LpSection::Bounds: parse_bound_line(b, stripped); break;
        case LpSection::Generals:
        case LpSection::Binaries:
            for (const auto& tk : tokenize(stripped)) {
                if (tk.kind != Token::Kind::Name) {
                    parse_error(line.number, tk.column, "expected a variable name");
                }
                (section == LpSection::Generals ? generals : binaries).emplace_back(tk.text, line.number);
            }
            break;
        case LpSection::End: break;
        }
    }
    if (section != LpSection::End) {
        parse_error(lines.empty() ? 1 : lines.back().number + 1, 1, "unexpected end of input, missing End");
    }
    if (!objective) {
        parse_error(objective_line == 0 ? 1 : objective_line, 1, "missing objective");
    }
    for (const auto& [name, line] : generals) {
        b.variable(name, line).kind = VarKind::Integer;
    }
    for (const auto& [name, line] : binaries) {
        b.variable(name, line).kind = VarKind::Binary;
    }
    CanonicalForm& form = b.form();
    form.objective.direction = direction;
    for (const auto& [name, coef] : objective->terms) {
        form.objective.expr.add_term(b.id(name, objective_line), coef);
    }
    form.objective.expr.set_constant(objective->constant);
    b.finish_rows(rows, provenance);
    return std::move(b.form());
}

CanonicalForm parse_mps(std::string_view text)
{
    enum class Section { None, Objsense, Rows, Columns, Rhs, Bounds, End };
    FormBuilder b;
    std::map<std::string, Provenance> provenance;
    std::vector<PendingRow> rows;
    std::unordered_map<std::string, std::size_t> row_index;
    std::string objective_row;
    std::vector<std::pair<std::string, Rational>> objective_terms;
    Rational objective_constant;
    Direction direction = Direction::Minimize;
    Section section = Section::None;
    bool integer_marker = false;
    std::unordered_map<std::string, bool> integral;
    bool saw_name = false;

    auto fields = [](const std::string& s) {
        std::vector<std::pair<std::string, std::size_t>> out;
        std::size_t i = 0;
        while (i < s.size()) {
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
                ++i;
            }
            std::size_t j = i;
            while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
                ++j;
            }
            if (j > i) {
                out.emplace_back(s.substr(i, j - i), i + 1);
            }
            i = j;
        }
        return out;
    };
    auto number = [](const std::pair<std::string, std::size_t>& f, std::size_t line) {
        auto r = Rational::parse(f.first);
        if (!r) {
            parse_error(line, f.second, "malformed number '" + f.first + "'");
        }
        return *r;
    };

    auto lines = split_lines(text);
    for (const auto& line : lines) {
        if (trim(line.text).empty()) {
            continue;
        }
        if (line.text.front() == '*') {
            if (auto p = parse_provenance(trim(std::string_view(line.text).substr(1)))) {
                provenance[p->first] = p->second;
            }
            continue;
        }
        auto f = fields(line.text);
        bool header = line.text.front() != ' ' && line.text.front() != '\t';
        if (header) {
            const std::string& key = f[0].first;
            if (key == "NAME") {
                saw_name = true;
                b.form().name = trim(std::string_view(line.text).substr(4));
                continue;
            }
            if (!saw_name) {
                parse_error(line.number, 1, "MPS file must start with NAME");
            }
            if (key == "OBJSENSE") {
                section = Section::Objsense;
                if (f.size() > 1) {
                    direction = f[1].first == "MAX" || f[1].first == "MAXIMIZE" ? Direction::Maximize : Direction::Minimize;
                }
            } else if (key == "ROWS") {
                section = Section::Rows;
            } else if (key == "COLUMNS") {
                section = Section::Columns;
            } else if (key == "RHS") {
                section = Section::Rhs;
            } else if (key == "BOUNDS") {
                section = Section::Bounds;
            } else if (key == "ENDATA") {
                section = Section::End;
                break;
            } else if (key == "RANGES" || key == "SOS" || key == "QUADOBJ" || key == "QMATRIX" || key == "QCMATRIX" ||
                       key == "INDICATORS" || key == "OBJSENSE" || key == "OBJNAME") {
                unsupported(line.number, "section " + key + " is outside the supported MPS subset");
            } else {
                parse_error(line.number, 1, "unknown section '" + key + "'");
            }
            continue;
        }
        switch (section) {
        case Section::None: parse_error(line.number, f[0].second, "data before any section");
        case Section::Objsense:
            if (f[0].first == "MAX" || f[0].first == "MAXIMIZE") {
                direction = Direction::Maximize;
            } else if (f[0].first == "MIN" || f[0].first == "MINIMIZE") {
                direction = Direction::Minimize;
            } else {
                parse_error(line.number, f[0].second, "expected MAX or MIN");
            }
            break;
        case Section::Rows: {
            if (f.size() != 2) {
                parse_error(line.number, f[0].second, "expected 'type name'");
            }
            const std::string& type = f[0].first;
            if (type == "N") {
                if (!objective_row.empty()) {
                    unsupported(line.number, "more than one objective row");
                }
                objective_row = f[1].first;
                break;
            }
            Sense s = type == "L" ? Sense::LE : type == "G" ? Sense::GE : type == "E" ? Sense::EQ : Sense::LE;
            if (type != "L" && type != "G" && type != "E") {
                parse_error(line.number, f[0].second, "unknown row type '" + type + "'");
            }
            row_index[f[1].first] = rows.size();
            rows.push_back({f[1].first, {}, s, Rational(0), line.number});
            break;
        }
        case Section::Columns: {
            if (f.size() >= 3 && f[1].first == "'MARKER'") {
                if (f[2].first == "'INTORG'") {
                    integer_marker = true;
                } else if (f[2].first == "'INTEND'") {
                    integer_marker = false;
                } else {
                    parse_error(line.number, f[2].second, "unknown marker");
                }
                break;
            }
            if (f.size() != 3 && f.size() != 5) {
                parse_error(line.number, f[0].second, "expected 'column row value [row value]'");
            }
            const std::string& col = f[0].first;
            if (!b.declared(col)) {
                b.declare(col, line.number);
                integral[col] = integer_marker;
            }
            for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                Rational value = number(f[k + 1], line.number);
                if (value.is_zero()) {
                    continue;
                }
                if (f[k].first == objective_row) {
                    objective_terms.emplace_back(col, value);
                } else if (auto it = row_index.find(f[k].first); it != row_index.end()) {
                    rows[it->second].terms.emplace_back(col, value);
                } else {
                    parse_error(line.number, f[k].second, "unknown row '" + f[k].first + "'");
                }
            }
            break;
        }
        case Section::Rhs: {
            if (f.size() != 3 && f.size() != 5) {
                parse_error(line.number, f[0].second, "expected 'set row value [row value]'");
            }
            for (std::size_t k = 1; k + 1 < f.size(); k += 2) {
                Rational value = number(f[k + 1], line.number);
                if (f[k].first == objective_row) {
                    objective_constant = -value;
                } else if (auto it = row_index.find(f[k].first); it != row_index.end()) {
                    rows[it->second].rhs = value;
                } else {
                    parse_error(line.number, f[k].second, "unknown row '" + f[k].first + "'");
                }
            }
            break;
        }
        case Section::Bounds: {
            if (f.size() < 3) {
                parse_error(line.number, f[0].second, "expected 'type set column [value]'");
            }
            const std::string& type = f[0].first;
            auto& v = b.variable(f[2].first, line.number);
            auto value = [&] {
                if (f.size() < 4) {
                    parse_error(line.number, line.text.size() + 1, "bound type " + type + " needs a value");
                }
                return number(f[3], line.number);
            };
            if (type == "UP") {
                v.upper = value();
            } else if (type == "LO") {
                v.lower = value();
            } else if (type == "FX") {
                v.lower = v.upper = value();
            } else if (type == "FR") {
                v.lower.reset();
                v.upper.reset();
            } else if (type == "MI") {
                v.lower.reset();
            } else if (type == "PL") {
                v.upper.reset();
            } else if (type == "BV") {
                v.kind = VarKind::Binary;
                v.lower = Rational(0);
                v.upper = Rational(1);
            } else {
                unsupported(line.number, "bound type " + type + " is outside the supported MPS subset");
            }
            break;
        }
        case Section::End: break;
        }
    }
    if (section != Section::End) {
        parse_error(lines.empty() ? 1 : lines.back().number + 1, 1, "unexpected end of input, missing ENDATA");
    }
    CanonicalForm& form = b.form();
    for (auto& v : form.variables) {
        if (v.kind != VarKind::Binary && integral[v.name]) {
            v.kind = VarKind::Integer;
        }
    }
    form.objective.direction = direction;
    for (const auto& [name, coef] : objective_terms) {
        form.objective.expr.add_term(b.id(name, 0), coef);
    }
    form.objective.expr.set_constant(objective_constant);
    b.finish_rows(rows, provenance);
    return std::move(b.form());
}

CanonicalForm parse_canonical(std::string_view text)
{
    for (const auto& line : split_lines(text)) {
        std::string t = trim(line.text);
        if (t.empty() || t.front() == '\\' || t.front() == '*') {
            continue;
        }
        if (line.text.starts_with("NAME")) {
            return parse_mps(text);
        }
        Direction ignored = Direction::Minimize;
        auto section = lp_section(t, line.number, ignored);
        if (section == LpSection::Objective) {
            return parse_lp(text);
        }
        unsupported(line.number, "neither an LP nor an MPS file");
    }
    parse_error(1, 1, "empty input");
}

} // namespace omtk
