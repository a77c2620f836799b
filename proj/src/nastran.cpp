#include "tens/nastran.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "tens/error.hpp"

namespace tens {

std::size_t NastranDiagnostics::skipped_total() const
{
    std::size_t n = 0;
    for (const auto& [name, count] : skipped) {
        n += count;
    }
    return n;
}

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string upper(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

struct Card {
    std::string name;
    std::vector<std::string> fields;  // data fields 2..9 of every physical line, continuation markers removed
    std::size_t line = 0;
    std::string image;  // first physical line
};

struct Line {
    std::string head;
    std::vector<std::string> data;
};

Line split_line(const std::string& text)
{
    Line out;
    if (text.find(',') != std::string::npos) {
        std::vector<std::string> tokens;
        std::string::size_type start = 0;
        while (true) {
            auto comma = text.find(',', start);
            tokens.push_back(trim(std::string_view(text).substr(start, comma - start)));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        out.head = tokens.front();
        const bool large = !out.head.empty() && (out.head.front() == '*' || out.head.back() == '*');
        const std::size_t per = large ? 4 : 8;
        // a free-field line is read as consecutive 10-field images: per data fields then a marker
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            if ((i - 1) % (per + 1) == per) {
                continue;
            }
            out.data.push_back(tokens[i]);
        }
        out.data.resize((out.data.size() + per - 1) / per * per);
        return out;
    }

    out.head = trim(std::string_view(text).substr(0, std::min<std::size_t>(8, text.size())));
    const bool large = !out.head.empty() && (out.head.front() == '*' || out.head.back() == '*');
    const std::size_t width = large ? 16 : 8;
    for (std::size_t col = 8; col < 72; col += width) {
        out.data.push_back(col < text.size() ? trim(std::string_view(text).substr(col, width)) : std::string{});
    }
    return out;
}

bool is_continuation(const std::string& head)
{
    return head.empty() || head.front() == '+' || head.front() == '*';
}

std::optional<std::int64_t> parse_int(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    std::int64_t v = 0;
    const char* first = s.data();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

/// NASTRAN reals: 1.0, 1., .5, 1.0E-3, 1.0D-3, and the implicit-exponent form 1.0-3.
std::optional<double> parse_real(std::string s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    for (auto& c : s) {
        if (c == 'D' || c == 'd') {
            c = 'E';
        }
    }
    if (s.find_first_of("Ee") == std::string::npos) {
        auto sign = s.find_first_of("+-", 1);
        if (sign != std::string::npos) {
            s.insert(sign, "E");
        }
    }
    const char* first = s.data();
    if (*first == '+') {
        ++first;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

const std::string& field(const Card& card, std::size_t i)
{
    static const std::string blank;
    return i < card.fields.size() ? card.fields[i] : blank;
}

std::int64_t require_int(const Card& card, std::size_t i, const char* what)
{
    auto v = parse_int(field(card, i));
    if (!v) {
        throw ParseError(card.line, card.image,
                         std::string(card.name) + " field " + std::to_string(i + 2) + " (" + what +
                             ") is not an integer: '" + field(card, i) + "'");
    }
    return *v;
}

double require_real(const Card& card, std::size_t i, const char* what)
{
    auto v = parse_real(field(card, i));
    if (!v) {
        throw ParseError(card.line, card.image,
                         std::string(card.name) + " field " + std::to_string(i + 2) + " (" + what +
                             ") is not a real: '" + field(card, i) + "'");
    }
    return *v;
}

/// `$REGION <pid> <name>`
void read_annotation(const std::string& comment, std::map<RegionId, std::string>& annotations)
{
    std::istringstream is(comment.substr(1));
    std::string tag;
    RegionId pid = 0;
    if (is >> tag && upper(tag) == "REGION" && is >> pid) {
        std::string name;
        std::getline(is, name);
        name = trim(name);
        if (!name.empty()) {
            annotations[pid] = name;
        }
    }
}

}  // namespace

Mesh parse_nastran(std::istream& in, NastranDiagnostics* diagnostics)
{
    NastranDiagnostics local;
    NastranDiagnostics& diag = diagnostics ? *diagnostics : local;
    diag = {};

    std::vector<std::string> lines;
    for (std::string text; std::getline(in, text);) {
        if (!text.empty() && text.back() == '\r') {
            text.pop_back();
        }
        lines.push_back(std::move(text));
    }

    std::size_t begin = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (upper(trim(lines[i])).rfind("BEGIN BULK", 0) == 0) {
            begin = i + 1;
            break;
        }
    }

    std::map<RegionId, std::string> annotations;
    for (std::size_t i = 0; i < begin; ++i) {
        const std::string trimmed = trim(lines[i]);
        if (!trimmed.empty() && trimmed.front() == '$') {
            read_annotation(trimmed, annotations);
        }
    }
    std::vector<Card> cards;
    for (std::size_t i = begin; i < lines.size(); ++i) {
        const std::string& text = lines[i];
        const std::string trimmed = trim(text);
        if (trimmed.empty()) {
            continue;
        }
        if (trimmed.front() == '$') {
            read_annotation(trimmed, annotations);
            continue;
        }
        if (upper(trimmed).rfind("ENDDATA", 0) == 0) {
            break;
        }
        Line line = split_line(text);
        if (is_continuation(line.head)) {
            if (cards.empty()) {
                throw ParseError(i + 1, text, "continuation line without a parent card");
            }
            auto& fields = cards.back().fields;
            fields.insert(fields.end(), line.data.begin(), line.data.end());
            continue;
        }
        Card card;
        card.name = upper(line.head);
        if (!card.name.empty() && card.name.back() == '*') {
            card.name.pop_back();
        }
        card.fields = std::move(line.data);
        card.line = i + 1;
        card.image = text;
        cards.push_back(std::move(card));
    }

    std::vector<Node> nodes;
    std::vector<Element> elements;
    std::vector<std::size_t> element_lines;
    std::vector<const Card*> element_cards;
    std::set<RegionId> regions;
    std::map<NodeId, std::size_t> grid_lines;
    std::set<ElementId> element_ids;

    for (const auto& card : cards) {
        if (card.name == "GRID") {
            const NodeId id = require_int(card, 0, "ID");
            const auto& cp = field(card, 1);
            if (!cp.empty() && parse_int(cp).value_or(-1) != 0) {
                throw ParseError(card.line, card.image, "GRID with coordinate system CP=" + cp + " is not supported");
            }
            if (!grid_lines.emplace(id, card.line).second) {
                throw ParseError(card.line, card.image, "duplicate GRID id " + std::to_string(id));
            }
            nodes.push_back({id, {require_real(card, 2, "X1"), require_real(card, 3, "X2"), require_real(card, 4, "X3")}});
        } else if (card.name == "CTETRA") {
            Element el;
            el.id = require_int(card, 0, "EID");
            el.region = require_int(card, 1, "PID");
            std::size_t count = 0;
            for (std::size_t k = 2; k < card.fields.size(); ++k) {
                if (!card.fields[k].empty()) {
                    if (k - 2 != count) {
                        throw ParseError(card.line, card.image, "CTETRA has a blank grid field before G" +
                                                                    std::to_string(k - 1));
                    }
                    ++count;
                }
            }
            if (count != 4 && count != 10) {
                throw ParseError(card.line, card.image,
                                 "CTETRA needs 4 or 10 grid ids, found " + std::to_string(count));
            }
            for (std::size_t k = 0; k < 4; ++k) {
                el.nodes[k] = require_int(card, 2 + k, "G");
            }
            for (std::size_t k = 4; k < count; ++k) {
                require_int(card, 2 + k, "G");
            }
            if (count == 10) {
                ++diag.quadratic_tets;
            }
            if (!element_ids.insert(el.id).second) {
                throw ParseError(card.line, card.image, "duplicate element id " + std::to_string(el.id));
            }
            regions.insert(el.region);
            elements.push_back(el);
            element_cards.push_back(&card);
        } else if (card.name == "PSOLID") {
            regions.insert(require_int(card, 0, "PID"));
        } else if (card.name == "CHEXA" || card.name == "CPENTA" || card.name == "CPYRAM") {
            throw ParseError(card.line, card.image, card.name + " elements are not supported (tetrahedra only)");
        } else {
            ++diag.skipped[card.name];
        }
    }

    for (std::size_t e = 0; e < elements.size(); ++e) {
        for (NodeId id : elements[e].nodes) {
            if (!grid_lines.contains(id)) {
                throw ParseError(element_cards[e]->line, element_cards[e]->image,
                                 "CTETRA " + std::to_string(elements[e].id) + " references missing GRID " +
                                     std::to_string(id));
            }
        }
    }

    std::map<RegionId, std::string> names;
    for (RegionId r : regions) {
        auto it = annotations.find(r);
        names[r] = it == annotations.end() ? std::to_string(r) : it->second;
    }

    Mesh raw(std::move(nodes), std::move(elements), std::move(names));
    Mesh oriented = orient_elements(raw);
    for (std::size_t e = 0; e < raw.element_count(); ++e) {
        if (raw.elements()[e].nodes != oriented.elements()[e].nodes) {
            ++diag.reoriented;
        }
    }
    return oriented;
}

Mesh read_nastran(const std::filesystem::path& path, NastranDiagnostics* diagnostics)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return parse_nastran(in, diagnostics);
}

namespace {

std::string format_real(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), ptr);
    if (s.find('.') == std::string::npos) {
        auto e = s.find('e');
        s.insert(e == std::string::npos ? s.size() : e, ".");
    }
    return s;
}

}  // namespace

void write_nastran(std::ostream& out, const Mesh& m)
{
    out << "$ tetrahedral volume mesh, free field, lengths in mm\n";
    for (const auto& [id, name] : m.region_names()) {
        if (name != std::to_string(id)) {
            out << "$REGION " << id << ' ' << name << '\n';
        }
    }
    out << "BEGIN BULK\n";
    for (const auto& [id, name] : m.region_names()) {
        out << "PSOLID," << id << ',' << id << '\n';
    }
    for (const auto& n : m.nodes()) {
        out << "GRID," << n.id << ",," << format_real(n.pos.x) << ',' << format_real(n.pos.y) << ','
            << format_real(n.pos.z) << '\n';
    }
    for (const auto& el : m.elements()) {
        out << "CTETRA," << el.id << ',' << el.region;
        for (NodeId id : el.nodes) {
            out << ',' << id;
        }
        out << '\n';
    }
    out << "ENDDATA\n";
}

void write_nastran(const std::filesystem::path& path, const Mesh& m)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_nastran(out, m);
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

std::map<RegionId, std::string> parse_region_map(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("region map is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error("region map must be a JSON object of \"pid\": \"name\"");
    }
    std::map<RegionId, std::string> out;
    for (const auto& [key, value] : j.items()) {
        auto id = parse_int(key);
        if (!id || !value.is_string()) {
            throw Error("region map entry '" + key + "' must map an integer id to a name");
        }
        out[*id] = value.get<std::string>();
    }
    return out;
}

std::map<RegionId, std::string> read_region_map(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_region_map(ss.str());
}

}  // namespace tens
