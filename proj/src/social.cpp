#include "camxref/social.hpp"

#include "camxref/error.hpp"
#include "camxref/io.hpp"
#include "camxref/text.hpp"

#include <json.hpp>

#include <clocale>
#include <cwctype>
#include <locale.h>
#include <set>
#include <variant>
#include <wctype.h>

namespace camxref::social {

bool StudyWindow::admits(const geo::GeoPoint& p, Timestamp ts) const
{
    return geo::contains(area, p) && start_ts <= ts && ts <= end_ts;
}

void StudyWindow::validate() const
{
    if (!geo::is_valid(area)) {
        throw ValidationError("study area is not a valid lat/lon box");
    }
    if (!(start_ts < end_ts)) {
        throw ValidationError("study window start must precede its end");
    }
}

StudyWindow default_study_window()
{
    return {geo::BoundingBox{24.0, 30.0, -87.0, -79.0}, make_utc(2017, 8, 20),
            make_utc(2017, 9, 13, 23, 59, 59)};
}

std::string_view to_string(Platform p) { return p == Platform::twitter ? "twitter" : "instagram"; }

std::string to_jsonl(const SocialPost& post)
{
    nlohmann::ordered_json j;
    j["post_id"] = post.post_id;
    j["platform"] = to_string(post.platform);
    j["ts_utc"] = format_rfc3339(post.ts_utc);
    j["lat"] = post.point.lat_deg;
    j["lon"] = post.point.lon_deg;
    j["text"] = post.text;
    j["has_image"] = post.has_image;
    return j.dump();
}

std::size_t RejectionReport::rejected() const
{
    std::size_t n = 0;
    for (const auto& [r, c] : by_reason) {
        n += c;
    }
    return n;
}

std::string RejectionReport::to_json() const
{
    nlohmann::ordered_json j;
    j["lines"] = lines;
    j["accepted"] = accepted;
    j["rejected"] = rejected();
    j["by_reason"] = nlohmann::ordered_json::object();
    for (const auto& [r, c] : by_reason) {
        j["by_reason"][r] = c;
    }
    return j.dump(2) + "\n";
}

std::string RejectionReport::summary() const
{
    std::string out = "posts: " + std::to_string(lines) + " lines, " + std::to_string(accepted) +
                      " accepted, " + std::to_string(rejected()) + " rejected\n";
    for (const auto& [r, c] : by_reason) {
        out += "  " + r + ": " + std::to_string(c) + "\n";
    }
    return out;
}

namespace {

struct LineError {
    std::string_view reason;
    std::string message;
};

// Returns the parsed post or the reason it was unusable.
std::variant<SocialPost, LineError> parse_line(std::string_view line)
{
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        return LineError{reason::malformed_json, "not a JSON object"};
    }
    auto bad = [](std::string msg) { return LineError{reason::invalid_field, std::move(msg)}; };

    SocialPost p;
    if (!j.contains("post_id") || !j["post_id"].is_string() ||
        j["post_id"].get<std::string>().empty()) {
        return bad("post_id must be a non-empty string");
    }
    p.post_id = j["post_id"].get<std::string>();

    if (!j.contains("platform") || !j["platform"].is_string()) {
        return bad("platform must be a string");
    }
    const auto platform = j["platform"].get<std::string>();
    if (platform == "twitter") {
        p.platform = Platform::twitter;
    } else if (platform == "instagram") {
        p.platform = Platform::instagram;
    } else {
        return LineError{reason::unknown_platform, "unknown platform '" + platform + "'"};
    }

    if (!j.contains("lat") || !j.contains("lon") || j["lat"].is_null() || j["lon"].is_null()) {
        return LineError{reason::missing_geotag, "post has no lat/lon"};
    }
    if (!j["lat"].is_number() || !j["lon"].is_number()) {
        return bad("lat/lon must be numbers");
    }
    p.point = {j["lat"].get<double>(), j["lon"].get<double>()};
    if (!geo::is_valid(p.point)) {
        return bad("lat/lon out of range");
    }

    if (!j.contains("ts_utc") || !j["ts_utc"].is_string()) {
        return bad("ts_utc must be a string");
    }
    const auto ts = parse_rfc3339(j["ts_utc"].get<std::string>());
    if (!ts) {
        return bad("ts_utc is not RFC 3339");
    }
    p.ts_utc = *ts;

    if (j.contains("text") && !j["text"].is_null()) {
        if (!j["text"].is_string()) {
            return bad("text must be a string");
        }
        p.text = j["text"].get<std::string>();
    }
    if (j.contains("has_image") && !j["has_image"].is_null()) {
        if (!j["has_image"].is_boolean()) {
            return bad("has_image must be a boolean");
        }
        p.has_image = j["has_image"].get<bool>();
    }
    return p;
}

} // namespace

ParseResult parse_posts_text(std::string_view text, const StudyWindow& window, bool strict)
{
    window.validate();
    ParseResult result;
    std::set<std::string, std::less<>> ids;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    auto reject = [&](std::string_view why, const std::string& message) {
        if (strict) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + message);
        }
        ++result.report.by_reason[std::string(why)];
    };

    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        const auto line = text::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) {
            continue;
        }
        ++result.report.lines;

        auto parsed = parse_line(line);
        if (auto* err = std::get_if<LineError>(&parsed)) {
            reject(err->reason, err->message);
            continue;
        }
        auto& post = std::get<SocialPost>(parsed);
        if (ids.count(post.post_id) != 0) {
            reject(reason::duplicate_post_id, "duplicate post_id '" + post.post_id + "'");
            continue;
        }
        ids.insert(post.post_id);
        if (!geo::contains(window.area, post.point)) {
            ++result.report.by_reason[std::string(reason::out_of_area)];
            continue;
        }
        if (post.ts_utc < window.start_ts || post.ts_utc > window.end_ts) {
            ++result.report.by_reason[std::string(reason::out_of_window)];
            continue;
        }
        result.posts.push_back(std::move(post));
    }
    result.report.accepted = result.posts.size();
    return result;
}

ParseResult parse_posts(const std::filesystem::path& path, const StudyWindow& window, bool strict)
{
    return parse_posts_text(io::read_file(path), window, strict);
}

namespace {

locale_t utf8_locale()
{
    static const locale_t loc = [] {
        locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
        if (l == static_cast<locale_t>(0)) {
            l = newlocale(LC_CTYPE_MASK, "en_US.UTF-8", static_cast<locale_t>(0));
        }
        return l;
    }();
    return loc;
}

char32_t fold(char32_t c)
{
    if (c < 0x80) {
        return (c >= U'A' && c <= U'Z') ? c + 32 : c;
    }
    const locale_t loc = utf8_locale();
    if (loc == static_cast<locale_t>(0)) {
        return c;
    }
    // lower(upper(c)) folds variants such as long s and final sigma together.
    return static_cast<char32_t>(towlower_l(towupper_l(static_cast<wint_t>(c), loc), loc));
}

} // namespace

std::u32string casefold(std::string_view s)
{
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        int len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool valid = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
        for (int k = 1; valid && k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            valid = (b & 0xC0) == 0x80;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!valid) {
            // Map stray bytes into a private range so they never match real text.
            out.push_back(0xDC00 + b0);
            ++i;
            continue;
        }
        out.push_back(fold(cp));
        i += static_cast<std::size_t>(len);
    }
    return out;
}

KeywordFilter::KeywordFilter(std::vector<std::string> terms) : terms_(std::move(terms))
{
    if (terms_.empty()) {
        throw ValidationError("at least one keyword term is required");
    }
    for (const auto& t : terms_) {
        if (t.empty()) {
            throw ValidationError("keyword term must not be empty");
        }
        folded_.push_back(casefold(t));
    }
}

bool KeywordFilter::matches(std::string_view text) const
{
    const auto folded = casefold(text);
    for (const auto& t : folded_) {
        if (folded.find(t) != std::u32string::npos) {
            return true;
        }
    }
    return false;
}

bool keyword_match(std::string_view text, std::string_view term)
{
    return KeywordFilter({std::string(term)}).matches(text);
}

std::vector<SocialPost> filter_posts(std::span<const SocialPost> posts, const KeywordFilter& filter)
{
    std::vector<SocialPost> out;
    for (const auto& p : posts) {
        if (filter.matches(p.text)) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<SocialPost> filter_posts(std::span<const SocialPost> posts, std::string_view term)
{
    return filter_posts(posts, KeywordFilter({std::string(term)}));
}

} // namespace camxref::social
