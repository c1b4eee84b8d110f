#include "rlbayes/netio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace rlbayes {

DiscreteNetwork::DiscreteNetwork(std::string name, Schema variables, Dag dag, std::vector<Cpt> cpts)
    : name_(std::move(name)), variables_(std::move(variables)), dag_(std::move(dag)), cpts_(std::move(cpts)) {
    const std::size_t n = variables_.size();
    if (dag_.n_nodes() != n) throw DataError("network dag size does not match its variables");
    if (cpts_.size() != n) throw DataError("network needs exactly one CPT per variable");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& var = variables_[i];
        if (var.cardinality() < 2) throw DataError("variable " + var.name + " needs at least 2 states");
        for (std::size_t a = 0; a < var.states.size(); ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                if (var.states[a] == var.states[b]) {
                    throw DataError("variable " + var.name + " repeats state " + var.states[a]);
                }
            }
        }
        const auto& cpt = cpts_[i];
        if (cpt.child != i) throw DataError("CPT order does not match variable order");
        if (cpt.parents != dag_.parents(i)) throw DataError("CPT parents of " + var.name + " disagree with the dag");
        std::size_t rows = 1;
        for (std::size_t p : cpt.parents) rows *= variables_[p].cardinality();
        if (cpt.table.size() != rows) {
            throw DataError("CPT of " + var.name + " has " + std::to_string(cpt.table.size()) + " rows, expected " +
                            std::to_string(rows));
        }
        for (const auto& row : cpt.table) {
            if (row.size() != var.cardinality()) throw DataError("CPT row width mismatch for " + var.name);
            double sum = 0;
            for (double p : row) {
                if (!(p >= 0.0) || !std::isfinite(p)) throw DataError("invalid probability in CPT of " + var.name);
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-6) throw DataError("CPT row of " + var.name + " does not sum to 1");
        }
    }
}

double density(const DiscreteNetwork& net) {
    const double n = static_cast<double>(net.n_nodes());
    if (net.n_nodes() < 2) throw ContractViolation("density needs at least 2 nodes");
    return static_cast<double>(net.dag().edge_count()) / (n * (n - 1));
}

namespace {

struct Token {
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
    bool punct = false;
};

bool is_punct(char c) {
    switch (c) {
        case '{': case '}': case '(': case ')': case '[': case ']': case ';': case ',': case '|':
            return true;
        default:
            return false;
    }
}

class Lexer {
public:
    explicit Lexer(std::string text) : text_(std::move(text)) { advance(); }

    const Token& peek() const {
        if (!current_) throw ParseError("unexpected end of input", line_, column_);
        return *current_;
    }
    bool done() const { return !current_.has_value(); }

    Token take() {
        Token t = peek();
        advance();
        return t;
    }

    Token expect(const std::string& text) {
        const Token& t = peek();
        if (t.text != text) throw ParseError("expected '" + text + "' but found '" + t.text + "'", t.line, t.column);
        return take();
    }

    Token expect_word() {
        const Token& t = peek();
        if (t.punct) throw ParseError("expected an identifier but found '" + t.text + "'", t.line, t.column);
        return take();
    }

    bool accept(const std::string& text) {
        if (!done() && peek().text == text) {
            advance();
            return true;
        }
        return false;
    }

    // Discards tokens through the next ';'.
    void skip_statement() {
        while (!accept(";")) take();
    }

private:
    void bump(char c) {
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void advance() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                bump(c);
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump(text_[pos_]);
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                bump('/');
                bump('*');
                while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) bump(text_[pos_]);
                if (pos_ + 1 >= text_.size()) throw ParseError("unterminated comment", line_, column_);
                bump('*');
                bump('/');
            } else {
                break;
            }
        }
        if (pos_ >= text_.size()) {
            current_.reset();
            return;
        }
        Token t;
        t.line = line_;
        t.column = column_;
        if (is_punct(text_[pos_])) {
            t.text = std::string(1, text_[pos_]);
            t.punct = true;
            bump(text_[pos_]);
        } else {
            while (pos_ < text_.size() && !is_punct(text_[pos_]) &&
                   !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                t.text.push_back(text_[pos_]);
                bump(text_[pos_]);
            }
        }
        current_ = std::move(t);
    }

    std::string text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    std::optional<Token> current_;
};

double parse_number(const Token& t) {
    double value = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("expected a number but found '" + t.text + "'", t.line, t.column);
    return value;
}

std::vector<double> parse_numbers(Lexer& lex) {
    std::vector<double> values{parse_number(lex.take())};
    while (lex.accept(",")) values.push_back(parse_number(lex.take()));
    lex.expect(";");
    return values;
}

struct RawBlock {
    Token child;
    std::vector<Token> parents;
    std::optional<std::vector<double>> table;
    std::vector<std::pair<std::vector<Token>, std::vector<double>>> rows;
};

void skip_braced(Lexer& lex) {
    lex.expect("{");
    int depth = 1;
    while (depth > 0) {
        const Token t = lex.take();
        if (t.text == "{") ++depth;
        if (t.text == "}") --depth;
    }
}

Variable parse_variable(Lexer& lex) {
    Variable var;
    var.name = lex.expect_word().text;
    lex.expect("{");
    bool typed = false;
    while (!lex.accept("}")) {
        const Token head = lex.expect_word();
        if (head.text == "type") {
            const Token kind = lex.expect_word();
            if (kind.text != "discrete") {
                throw ParseError("unsupported variable type '" + kind.text + "'", kind.line, kind.column);
            }
            lex.expect("[");
            const Token count = lex.expect_word();
            const auto declared = static_cast<std::size_t>(parse_number(count));
            lex.expect("]");
            lex.expect("{");
            var.states.push_back(lex.expect_word().text);
            while (lex.accept(",")) var.states.push_back(lex.expect_word().text);
            lex.expect("}");
            lex.expect(";");
            if (declared != var.states.size()) {
                throw ParseError("variable " + var.name + " declares " + count.text + " states but lists " +
                                     std::to_string(var.states.size()),
                                 count.line, count.column);
            }
            typed = true;
        } else {
            lex.skip_statement();
        }
    }
    if (!typed) throw ParseError("variable " + var.name + " has no type", 0, 0);
    return var;
}

RawBlock parse_probability(Lexer& lex) {
    RawBlock block;
    lex.expect("(");
    block.child = lex.expect_word();
    if (lex.accept("|")) {
        block.parents.push_back(lex.expect_word());
        while (lex.accept(",")) block.parents.push_back(lex.expect_word());
    }
    lex.expect(")");
    lex.expect("{");
    while (!lex.accept("}")) {
        const Token& head = lex.peek();
        if (head.text == "(") {
            lex.take();
            std::vector<Token> labels{lex.expect_word()};
            while (lex.accept(",")) labels.push_back(lex.expect_word());
            lex.expect(")");
            block.rows.emplace_back(std::move(labels), parse_numbers(lex));
        } else if (head.text == "table") {
            lex.take();
            block.table = parse_numbers(lex);
        } else {
            lex.take();
            lex.skip_statement();
        }
    }
    return block;
}

void normalize_row(std::vector<double>& row, const std::string& where, const Token& at,
                   std::vector<std::string>& warnings) {
    double sum = 0;
    for (double p : row) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ParseError("negative or invalid probability in " + where, at.line, at.column);
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
        std::ostringstream msg;
        msg << "probabilities in " << where << " sum to " << sum;
        throw ParseError(msg.str(), at.line, at.column);
    }
    // Rows off by rounding only are kept verbatim so write/parse is a fixed point.
    if (std::abs(sum - 1.0) > 1e-9) {
        for (double& p : row) p /= sum;
        std::ostringstream msg;
        msg << "renormalized " << where << " (sum was " << sum << ")";
        warnings.push_back(msg.str());
    }
}

}  // namespace

DiscreteNetwork parse_bif(const std::string& text) {
    Lexer lex(text);
    std::string name = "unknown";
    Schema variables;
    std::map<std::string, std::size_t> index;
    std::vector<RawBlock> blocks;

    while (!lex.done()) {
        const Token head = lex.expect_word();
        if (head.text == "network") {
            name = lex.expect_word().text;
            skip_braced(lex);
        } else if (head.text == "variable") {
            Variable var = parse_variable(lex);
            if (!index.emplace(var.name, variables.size()).second) {
                throw ParseError("variable " + var.name + " declared twice", head.line, head.column);
            }
            variables.push_back(std::move(var));
        } else if (head.text == "probability") {
            blocks.push_back(parse_probability(lex));
        } else {
            throw ParseError("unexpected '" + head.text + "'", head.line, head.column);
        }
    }

    const std::size_t n = variables.size();
    auto resolve = [&](const Token& t) {
        const auto it = index.find(t.text);
        if (it == index.end()) throw ParseError("unknown variable '" + t.text + "'", t.line, t.column);
        return it->second;
    };

    std::vector<Cpt> cpts(n);
    std::vector<bool> seen(n, false);
    std::vector<Edge> edges;
    std::vector<std::string> warnings;
    for (const auto& block : blocks) {
        const std::size_t child = resolve(block.child);
        if (seen[child]) {
            throw ParseError("second probability block for " + block.child.text, block.child.line, block.child.column);
        }
        seen[child] = true;
        const std::size_t r = variables[child].cardinality();

        std::vector<std::size_t> declared;
        for (const auto& p : block.parents) {
            const std::size_t pi = resolve(p);
            for (std::size_t q : declared) {
                if (q == pi) throw ParseError("duplicate parent '" + p.text + "'", p.line, p.column);
            }
            if (pi == child) throw ParseError("variable is its own parent", p.line, p.column);
            declared.push_back(pi);
            edges.emplace_back(pi, child);
        }

        Cpt& cpt = cpts[child];
        cpt.child = child;
        cpt.parents = declared;
        std::sort(cpt.parents.begin(), cpt.parents.end());
        std::size_t q = 1;
        for (std::size_t p : cpt.parents) q *= variables[p].cardinality();
        cpt.table.assign(q, {});

        const std::string where = "probability block of " + variables[child].name;
        if (block.table) {
            if (!declared.empty()) {
                throw ParseError("'table' is only supported for variables without parents", block.child.line,
                                 block.child.column);
            }
            if (!block.rows.empty()) throw ParseError("mixed table and rows", block.child.line, block.child.column);
            if (block.table->size() != r) {
                throw ParseError(where + " has " + std::to_string(block.table->size()) + " entries, expected " +
                                     std::to_string(r),
                                 block.child.line, block.child.column);
            }
            cpt.table[0] = *block.table;
            normalize_row(cpt.table[0], where, block.child, warnings);
        } else {
            if (block.rows.size() != q) {
                throw ParseError(where + " has " + std::to_string(block.rows.size()) + " rows, expected " +
                                     std::to_string(q),
                                 block.child.line, block.child.column);
            }
            std::vector<bool> filled(q, false);
            for (const auto& [labels, values] : block.rows) {
                const Token& at = labels.front();
                if (labels.size() != declared.size()) {
                    throw ParseError(where + ": row names " + std::to_string(labels.size()) + " parent states, expected " +
                                         std::to_string(declared.size()),
                                     at.line, at.column);
                }
                // Map declared-order labels to the ascending-parent configuration.
                std::size_t config = 0;
                for (std::size_t sorted = 0; sorted < cpt.parents.size(); ++sorted) {
                    const std::size_t p = cpt.parents[sorted];
                    const auto pos = static_cast<std::size_t>(
                        std::find(declared.begin(), declared.end(), p) - declared.begin());
                    const auto& states = variables[p].states;
                    const auto s = std::find(states.begin(), states.end(), labels[pos].text);
                    if (s == states.end()) {
                        throw ParseError("unknown state '" + labels[pos].text + "' of " + variables[p].name,
                                         labels[pos].line, labels[pos].column);
                    }
                    config = config * states.size() + static_cast<std::size_t>(s - states.begin());
                }
                if (filled[config]) throw ParseError(where + " repeats a parent configuration", at.line, at.column);
                filled[config] = true;
                if (values.size() != r) {
                    throw ParseError(where + " row has " + std::to_string(values.size()) + " entries, expected " +
                                         std::to_string(r),
                                     at.line, at.column);
                }
                cpt.table[config] = values;
                normalize_row(cpt.table[config], where, at, warnings);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) throw ParseError("variable " + variables[i].name + " has no probability block", 0, 0);
    }

    Dag dag;
    try {
        dag = Dag::from_edges(n, edges);
    } catch (const ContractViolation& e) {
        throw DataError(std::string("network structure is not a DAG: ") + e.what());
    }
    DiscreteNetwork net(std::move(name), std::move(variables), std::move(dag), std::move(cpts));
    for (auto& w : warnings) net.add_warning(std::move(w));
    return net;
}

DiscreteNetwork parse_bif(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_bif(text);
}

DiscreteNetwork parse_bif_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return parse_bif(in);
}

namespace {

std::string format_probability(double p) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p);
    std::string s(buf, ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

}  // namespace

void write_bif(std::ostream& out, const DiscreteNetwork& net) {
    const auto& vars = net.variables();
    out << "network " << net.name() << " {\n}\n";
    for (const auto& var : vars) {
        out << "variable " << var.name << " {\n  type discrete [ " << var.cardinality() << " ] { ";
        for (std::size_t s = 0; s < var.states.size(); ++s) out << (s ? ", " : "") << var.states[s];
        out << " };\n}\n";
    }
    for (const auto& cpt : net.cpts()) {
        out << "probability ( " << vars[cpt.child].name;
        for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
            out << (i ? ", " : " | ") << vars[cpt.parents[i]].name;
        }
        out << " ) {\n";
        auto write_values = [&](const std::vector<double>& row) {
            for (std::size_t k = 0; k < row.size(); ++k) out << (k ? ", " : "") << format_probability(row[k]);
            out << ";\n";
        };
        if (cpt.parents.empty()) {
            out << "  table ";
            write_values(cpt.table.front());
        } else {
            for (std::size_t j = 0; j < cpt.table.size(); ++j) {
                std::vector<std::size_t> digits(cpt.parents.size());
                std::size_t rest = j;
                for (std::size_t i = cpt.parents.size(); i-- > 0;) {
                    const std::size_t card = vars[cpt.parents[i]].cardinality();
                    digits[i] = rest % card;
                    rest /= card;
                }
                out << "  (";
                for (std::size_t i = 0; i < digits.size(); ++i) {
                    out << (i ? ", " : "") << vars[cpt.parents[i]].states[digits[i]];
                }
                out << ") ";
                write_values(cpt.table[j]);
            }
        }
        out << "}\n";
    }
}

std::string write_bif(const DiscreteNetwork& net) {
    std::ostringstream out;
    write_bif(out, net);
    return out.str();
}

}  // namespace rlbayes
