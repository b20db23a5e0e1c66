#include "agentsim/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <sstream>

namespace agentsim::agents {

namespace {

std::string trim(std::string_view s)
{
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) {
        return {};
    }
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

const std::regex& numeral_pattern()
{
    static const std::regex re(R"(\d+\.\d+|\d+)");
    return re;
}

std::string last_match(const std::string& text, const std::regex& re)
{
    std::string last;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
        last = it->str();
    }
    return last;
}

std::int64_t truncate_numeral(const std::string& numeral)
{
    const auto dot = numeral.find('.');
    const std::string whole = dot == std::string::npos ? numeral : numeral.substr(0, dot);
    try {
        return std::stoll(whole);
    } catch (const std::exception&) {
        throw ParseError("coordinate out of range: " + numeral);
    }
}

} // namespace

std::string parse_anchored(const std::string& text, const std::string& anchor)
{
    if (anchor.empty()) {
        throw std::invalid_argument("anchor must be non-empty");
    }
    std::vector<std::string_view> lines;
    std::string_view rest(text);
    for (;;) {
        auto nl = rest.find('\n');
        lines.push_back(rest.substr(0, nl));
        if (nl == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(nl + 1);
    }
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        auto pos = it->find(anchor);
        if (pos != std::string_view::npos) {
            return std::string(it->substr(pos + anchor.size()));
        }
    }
    throw ParseError("missing '" + anchor + "' line");
}

Point2D parse_coordinate_pair(const std::string& raw)
{
    static const std::regex group(R"(\(.*?\))");
    const std::string last = last_match(raw, group);
    if (last.empty()) {
        throw ParseError("no parenthesized coordinate pair");
    }
    const std::string inner = last.substr(1, last.size() - 2);
    const auto comma = inner.find(',');
    if (comma == std::string::npos) {
        throw ParseError("coordinate pair needs two comma-separated values");
    }
    const std::string x = last_match(inner.substr(0, comma), numeral_pattern());
    const std::string y = last_match(inner.substr(comma + 1), numeral_pattern());
    if (x.empty() || y.empty()) {
        throw ParseError("coordinate pair needs two numerals");
    }
    return Point2D{truncate_numeral(x), truncate_numeral(y)};
}

BigInt parse_integer_answer(const std::string& raw)
{
    static const std::regex digits(R"(\d+)");
    const std::string last = last_match(raw, digits);
    if (last.empty()) {
        throw ParseError("no integer in answer");
    }
    return BigInt(last);
}

bool parse_yes_no(const std::string& raw)
{
    std::string word = trim(raw);
    auto end = std::find_if(word.begin(), word.end(), [](unsigned char c) { return !std::isalpha(c); });
    word.erase(end, word.end());
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::toupper(c); });
    if (word == "YES") {
        return true;
    }
    if (word == "NO") {
        return false;
    }
    throw ParseError("expected YES or NO");
}

std::vector<std::int64_t> parse_integer_list(const std::string& raw)
{
    static const std::regex list(R"(\[[^\[\]]*\])");
    const std::string last = last_match(raw, list);
    if (last.empty()) {
        throw ParseError("no bracketed list");
    }
    std::vector<std::int64_t> values;
    std::stringstream items(last.substr(1, last.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) {
            continue;
        }
        if (!std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw ParseError("list item is not an integer: '" + t + "'");
        }
        try {
            values.push_back(std::stoll(t));
        } catch (const std::exception&) {
            throw ParseError("list item out of range: '" + t + "'");
        }
    }
    return values;
}

std::uint64_t estimate_tokens(const std::string& text) noexcept
{
    std::uint64_t count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        const bool space = std::isspace(c) != 0;
        if (!space && !in_word) {
            ++count;
        }
        in_word = !space;
    }
    return count;
}

} // namespace agentsim::agents
