#include "camxref/synth.hpp"

#include "camxref/error.hpp"
#include "camxref/io.hpp"
#include "camxref/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace camxref::synth {

namespace {

// mt19937_64 output is fully specified by the standard; the distributions are
// not, so they are written out here to keep fixtures byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool chance(double p) { return unit() < p; }

    template <typename T> const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

    /// Index into `cumulative` (running sums of non-negative weights).
    std::size_t weighted(const std::vector<double>& cumulative)
    {
        const double r = unit() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                     cumulative.size() - 1);
    }

private:
    std::mt19937_64 engine_;
};

constexpr int kNone = -1;

// Mutually exclusive post kinds; each funnel column is a suffix sum of these.
enum Category : int { plain = 0, keyword_other = 1, instagram_irrelevant = 2, instagram_relevant = 3 };
constexpr int kCategories = 4;

using CategoryCounts = std::array<std::int64_t, kCategories>;

CategoryCounts ring_categories(const crossref::FunnelCounts& inner,
                               const crossref::FunnelCounts& outer)
{
    const auto dt = outer.total - inner.total;
    const auto dk = outer.keyword - inner.keyword;
    const auto di = outer.keyword_instagram - inner.keyword_instagram;
    const auto dr = outer.relevant - inner.relevant;
    return {dt - dk, dk - di, di - dr, dr};
}

std::string ring_name(const std::vector<double>& scales, std::size_t r)
{
    const std::string inner = r == 0 ? "0" : text::format_double(scales[r - 1]);
    return "ring " + inner + "-" + text::format_double(scales[r]) + " mi";
}

std::string group_name(const GroupTarget& g, std::size_t i)
{
    return "group " + std::to_string(i) + " (" + g.city + ")";
}

// Keyword templates carry a {T} placeholder for the search term.
const std::vector<std::string> kKeywordTemplates = {
    "{T} is getting closer, stay safe everyone",
    "#hurricane{t} flooding on our street",
    "Trees down all over the neighborhood after {T}",
    "Waiting out {T} with the family #staysafe",
    "Wind is picking up. {T} is no joke",
    "Water coming over the seawall #{T}",
    "No power since last night thanks to {T}",
    "Checking on the neighbors after #{t}",
};

const std::vector<std::string> kPlainTemplates = {
    "Power is out on our block",
    "Beautiful sunset tonight",
    "Dinner plans fell apart",
    "Boarding up the windows",
    "Gas lines are long today",
    "Coffee first, then everything else",
    "Beach walk before the storm",
    "Traffic on the interstate is a mess",
    "Grocery shelves are empty",
    "Game night with friends",
};

std::string lower_ascii(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

std::string fill_template(const std::string& tpl, const std::string& term)
{
    std::string out;
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl.compare(i, 3, "{T}") == 0) {
            out += term;
            i += 2;
        } else if (tpl.compare(i, 3, "{t}") == 0) {
            out += lower_ascii(term);
            i += 2;
        } else {
            out.push_back(tpl[i]);
        }
    }
    return out;
}

struct Cell {
    double lat_lo, lat_hi, lon_lo, lon_hi;
};

struct SpatialClass {
    std::vector<int> sig; // per group: smallest scale containing the class, or kNone
    std::vector<Cell> cells;
    std::vector<double> cell_cumulative;
};

struct TimeSlot {
    Timestamp lo; // inclusive
    Timestamp hi; // inclusive
};

struct Atom {
    std::vector<int> sig;
    std::vector<std::pair<std::size_t, std::size_t>> members; // (class, slot)
    std::vector<double> cumulative;
    int finite = 0;
};

class Placer {
public:
    Placer(const FixtureSpec& spec, const std::vector<GroupTarget>& groups)
        : spec_(spec), groups_(groups)
    {
        for (const auto& g : groups_) {
            std::vector<geo::BoundingBox> boxes;
            for (const double s : spec_.scales_miles) {
                boxes.push_back(geo::bounding_box(g.center, geo::CatchmentScale{s}));
            }
            boxes_.push_back(std::move(boxes));
        }
        build_classes();
        build_slots();
        build_atoms();
    }

    std::vector<int> signature(const geo::GeoPoint& p, Timestamp ts) const
    {
        std::vector<int> sig(groups_.size(), kNone);
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (ts < groups_[g].start_ts || ts > groups_[g].end_ts) {
                continue;
            }
            for (std::size_t s = 0; s < boxes_[g].size(); ++s) {
                if (geo::contains(boxes_[g][s], p)) {
                    sig[g] = static_cast<int>(s);
                    break;
                }
            }
        }
        return sig;
    }

    const std::vector<Atom>& atoms() const { return atoms_; }

    /// Draws a point and time inside `atom`, rounded to 1e-6 degrees, whose
    /// true signature equals the atom's.
    std::pair<geo::GeoPoint, Timestamp> sample(const Atom& atom, Rng& rng) const
    {
        for (int attempt = 0; attempt < 200; ++attempt) {
            const auto [ci, si] = atom.members[rng.weighted(atom.cumulative)];
            const auto& cls = classes_[ci];
            const Cell& cell = cls.cells[rng.weighted(cls.cell_cumulative)];
            const auto& slot = slots_[si];
            const Timestamp ts{std::chrono::seconds{
                rng.between(slot.lo.time_since_epoch().count(), slot.hi.time_since_epoch().count())}};
            geo::GeoPoint p{cell.lat_lo + (0.001 + 0.998 * rng.unit()) * (cell.lat_hi - cell.lat_lo),
                            cell.lon_lo + (0.001 + 0.998 * rng.unit()) * (cell.lon_hi - cell.lon_lo)};
            if (attempt < 150) {
                p = {std::round(p.lat_deg * 1e6) / 1e6, std::round(p.lon_deg * 1e6) / 1e6};
            }
            if (spec_.study.admits(p, ts) && signature(p, ts) == atom.sig) {
                return {p, ts};
            }
        }
        throw std::logic_error("could not sample a point inside a placement region");
    }

    /// Uniform point/time in the study window counted by no group.
    std::optional<std::pair<geo::GeoPoint, Timestamp>> sample_background(Rng& rng) const
    {
        const auto& a = spec_.study.area;
        for (int attempt = 0; attempt < 10000; ++attempt) {
            geo::GeoPoint p{std::round((a.min_lat + rng.unit() * (a.max_lat - a.min_lat)) * 1e6) / 1e6,
                            std::round((a.min_lon + rng.unit() * (a.max_lon - a.min_lon)) * 1e6) / 1e6};
            const Timestamp ts{std::chrono::seconds{
                rng.between(spec_.study.start_ts.time_since_epoch().count(),
                            spec_.study.end_ts.time_since_epoch().count())}};
            if (!spec_.study.admits(p, ts)) {
                continue;
            }
            const auto sig = signature(p, ts);
            if (std::all_of(sig.begin(), sig.end(), [](int s) { return s == kNone; })) {
                return std::pair{p, ts};
            }
        }
        return std::nullopt;
    }

private:
    void build_classes()
    {
        const auto& area = spec_.study.area;
        std::vector<double> lats{area.min_lat, area.max_lat};
        std::vector<double> lons{area.min_lon, area.max_lon};
        for (const auto& boxes : boxes_) {
            for (const auto& b : boxes) {
                for (double v : {b.min_lat, b.max_lat}) {
                    if (v > area.min_lat && v < area.max_lat) {
                        lats.push_back(v);
                    }
                }
                for (double v : {b.min_lon, b.max_lon}) {
                    if (v > area.min_lon && v < area.max_lon) {
                        lons.push_back(v);
                    }
                }
            }
        }
        auto uniq = [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        uniq(lats);
        uniq(lons);

        std::map<std::vector<int>, std::size_t> index;
        for (std::size_t i = 0; i + 1 < lats.size(); ++i) {
            for (std::size_t j = 0; j + 1 < lons.size(); ++j) {
                const Cell cell{lats[i], lats[i + 1], lons[j], lons[j + 1]};
                const geo::GeoPoint mid{(cell.lat_lo + cell.lat_hi) / 2,
                                        (cell.lon_lo + cell.lon_hi) / 2};
                std::vector<int> sig(groups_.size(), kNone);
                bool any = false;
                for (std::size_t g = 0; g < groups_.size(); ++g) {
                    for (std::size_t s = 0; s < boxes_[g].size(); ++s) {
                        if (geo::contains(boxes_[g][s], mid)) {
                            sig[g] = static_cast<int>(s);
                            any = true;
                            break;
                        }
                    }
                }
                if (!any) {
                    continue;
                }
                const auto [it, inserted] = index.emplace(sig, classes_.size());
                if (inserted) {
                    classes_.push_back({sig, {}, {}});
                }
                auto& cls = classes_[it->second];
                const double w = (cell.lat_hi - cell.lat_lo) * (cell.lon_hi - cell.lon_lo);
                cls.cells.push_back(cell);
                cls.cell_cumulative.push_back((cls.cell_cumulative.empty() ? 0.0
                                                                           : cls.cell_cumulative.back()) +
                                              w);
            }
        }
    }

    void build_slots()
    {
        const auto lo = spec_.study.start_ts;
        const auto hi = spec_.study.end_ts;
        std::vector<Timestamp> points{lo, hi};
        for (const auto& g : groups_) {
            for (Timestamp t : {g.start_ts, g.end_ts}) {
                if (t > lo && t < hi) {
                    points.push_back(t);
                }
            }
        }
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        for (std::size_t i = 0; i < points.size(); ++i) {
            slots_.push_back({points[i], points[i]});
            if (i + 1 < points.size() && points[i + 1] - points[i] >= std::chrono::seconds{2}) {
                slots_.push_back({points[i] + std::chrono::seconds{1},
                                  points[i + 1] - std::chrono::seconds{1}});
            }
        }
    }

    void build_atoms()
    {
        std::map<std::vector<int>, std::size_t> index;
        for (std::size_t si = 0; si < slots_.size(); ++si) {
            const auto& slot = slots_[si];
            std::vector<bool> active(groups_.size());
            for (std::size_t g = 0; g < groups_.size(); ++g) {
                active[g] = groups_[g].start_ts <= slot.lo && slot.lo <= groups_[g].end_ts;
            }
            const double seconds = static_cast<double>((slot.hi - slot.lo).count() + 1);
            for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
                std::vector<int> sig = classes_[ci].sig;
                int finite = 0;
                for (std::size_t g = 0; g < sig.size(); ++g) {
                    if (!active[g]) {
                        sig[g] = kNone;
                    }
                    finite += sig[g] != kNone ? 1 : 0;
                }
                if (finite == 0) {
                    continue;
                }
                const auto [it, inserted] = index.emplace(sig, atoms_.size());
                if (inserted) {
                    atoms_.push_back({sig, {}, {}, finite});
                }
                auto& atom = atoms_[it->second];
                atom.members.emplace_back(ci, si);
                const double w = classes_[ci].cell_cumulative.back() * seconds;
                atom.cumulative.push_back((atom.cumulative.empty() ? 0.0 : atom.cumulative.back()) +
                                          w);
            }
        }
    }

    const FixtureSpec& spec_;
    const std::vector<GroupTarget>& groups_;
    std::vector<std::vector<geo::BoundingBox>> boxes_;
    std::vector<SpatialClass> classes_;
    std::vector<TimeSlot> slots_;
    std::vector<Atom> atoms_;
};

struct Assignment {
    std::size_t atom;
    Category category;
};

// Assigns every (group, ring, category) demand to placement regions. A post
// in a region shared by several groups satisfies one unit of demand for each.
std::vector<Assignment> solve(const FixtureSpec& spec, const std::vector<GroupTarget>& groups,
                              const Placer& placer)
{
    const auto& atoms = placer.atoms();
    const std::size_t G = groups.size();
    const std::size_t S = spec.scales_miles.size();

    // exclusive[g][r]: regions counted by group g at ring r and nobody else.
    std::vector<std::vector<std::vector<std::size_t>>> exclusive(
        G, std::vector<std::vector<std::size_t>>(S));
    std::vector<std::vector<std::vector<std::size_t>>> candidates(
        G, std::vector<std::vector<std::size_t>>(S));
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        for (std::size_t g = 0; g < G; ++g) {
            const int r = atoms[a].sig[g];
            if (r == kNone) {
                continue;
            }
            candidates[g][static_cast<std::size_t>(r)].push_back(a);
            if (atoms[a].finite == 1) {
                exclusive[g][static_cast<std::size_t>(r)].push_back(a);
            }
        }
    }

    std::vector<Assignment> out;
    for (int k = 0; k < kCategories; ++k) {
        const auto category = static_cast<Category>(k);
        std::vector<std::vector<std::int64_t>> demand(G, std::vector<std::int64_t>(S, 0));
        for (std::size_t g = 0; g < G; ++g) {
            crossref::FunnelCounts prev;
            for (std::size_t r = 0; r < S; ++r) {
                demand[g][r] = ring_categories(prev, groups[g].funnel_by_scale[r])[k];
                prev = groups[g].funnel_by_scale[r];
            }
        }

        auto allocate_shared = [&](std::size_t g, std::size_t r, bool widest_first) {
            auto cands = candidates[g][r];
            std::stable_sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
                return widest_first ? atoms[a].finite > atoms[b].finite
                                    : atoms[a].finite < atoms[b].finite;
            });
            for (const std::size_t a : cands) {
                if (demand[g][r] == 0) {
                    break;
                }
                if (atoms[a].finite < 2) {
                    continue;
                }
                std::int64_t cap = demand[g][r];
                for (std::size_t h = 0; h < G; ++h) {
                    if (atoms[a].sig[h] != kNone) {
                        cap = std::min(cap, demand[h][static_cast<std::size_t>(atoms[a].sig[h])]);
                    }
                }
                if (cap <= 0) {
                    continue;
                }
                for (std::size_t h = 0; h < G; ++h) {
                    if (atoms[a].sig[h] != kNone) {
                        demand[h][static_cast<std::size_t>(atoms[a].sig[h])] -= cap;
                    }
                }
                out.insert(out.end(), static_cast<std::size_t>(cap), Assignment{a, category});
            }
        };

        // Demands with nowhere exclusive to go claim shared capacity first.
        for (std::size_t g = 0; g < G; ++g) {
            for (std::size_t r = 0; r < S; ++r) {
                if (demand[g][r] > 0 && exclusive[g][r].empty()) {
                    allocate_shared(g, r, false);
                }
            }
        }
        if (spec.placement == Placement::shared) {
            for (std::size_t g = 0; g < G; ++g) {
                for (std::size_t r = 0; r < S; ++r) {
                    allocate_shared(g, r, true);
                }
            }
        }
        for (std::size_t g = 0; g < G; ++g) {
            for (std::size_t r = 0; r < S; ++r) {
                if (demand[g][r] == 0) {
                    continue;
                }
                const auto& pool = exclusive[g][r];
                if (pool.empty()) {
                    throw ValidationError(
                        group_name(groups[g], g) + ", " + ring_name(spec.scales_miles, r) +
                        ": cannot place " + std::to_string(demand[g][r]) +
                        " posts; every admissible region also counts for other groups whose "
                        "targets are already met (or the ring lies outside the study window)");
                }
                // Atoms are unique per signature, so the pool has one region.
                out.insert(out.end(), static_cast<std::size_t>(demand[g][r]),
                           Assignment{pool.front(), category});
                demand[g][r] = 0;
            }
        }
    }
    return out;
}

struct Draft {
    social::SocialPost post;
    std::optional<bool> label;
};

} // namespace

std::vector<GroupTarget> check_targets(const FixtureSpec& spec, RepairPolicy policy,
                                       std::vector<std::string>* repairs)
{
    crossref::validate_scales(spec.scales_miles);
    spec.study.validate();
    if (spec.term.empty()) {
        throw ValidationError("fixture term must not be empty");
    }
    if (spec.background_posts < 0 || spec.outside_posts < 0 || spec.keyword_post_target < 0) {
        throw ValidationError("post counts must be non-negative");
    }
    if (!(spec.thinning_rate > 0.0 && spec.thinning_rate <= 1.0)) {
        throw ValidationError("thinning_rate must be in (0, 1]");
    }

    std::vector<GroupTarget> realized;
    for (std::size_t i = 0; i < spec.groups.size(); ++i) {
        const auto& g = spec.groups[i];
        const auto name = group_name(g, i);
        if (g.funnel_by_scale.size() != spec.scales_miles.size()) {
            throw ValidationError(name + ": expected " + std::to_string(spec.scales_miles.size()) +
                                  " values per funnel column");
        }
        if (!geo::is_valid(g.center) || !geo::contains(spec.study.area, g.center)) {
            throw ValidationError(name + ": centre lies outside the study area");
        }
        if (g.end_ts < g.start_ts) {
            throw ValidationError(name + ": disruption end precedes start");
        }
        if (g.cameras_in_group < 1) {
            throw ValidationError(name + ": cameras_in_group must be at least 1");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = spec.groups[j];
            if (o.center == g.center && o.start_ts == g.start_ts && o.end_ts == g.end_ts) {
                throw ValidationError(name + ": same coordinates and window as " +
                                      group_name(o, j) + "; merge them into one group");
            }
        }

        GroupTarget out = g;
        crossref::FunnelCounts prev;
        for (std::size_t r = 0; r < g.funnel_by_scale.size(); ++r) {
            const auto& want = g.funnel_by_scale[r];
            const auto ring = ring_name(spec.scales_miles, r);
            const auto scale = text::format_double(spec.scales_miles[r]) + " mi";
            const std::array<std::int64_t, 4> col{want.total, want.keyword, want.keyword_instagram,
                                                  want.relevant};
            const std::array<std::int64_t, 4> before{prev.total, prev.keyword,
                                                     prev.keyword_instagram, prev.relevant};
            static constexpr const char* kNames[] = {"total", "keyword", "instagram", "relevant"};

            std::array<std::int64_t, 4> d{};
            for (int c = 0; c < 4; ++c) {
                d[c] = col[c] - before[c];
            }
            std::string problem;
            for (int c = 0; c < 4 && problem.empty(); ++c) {
                if (col[c] < 0) {
                    problem = std::string(kNames[c]) + " count is negative at " + scale;
                }
            }
            for (int c = 1; c < 4 && problem.empty(); ++c) {
                if (col[c] > col[c - 1]) {
                    problem = std::string(kNames[c]) + " " + std::to_string(col[c]) + " exceeds " +
                              kNames[c - 1] + " " + std::to_string(col[c - 1]) + " at " + scale;
                }
            }
            for (int c = 0; c < 4 && problem.empty(); ++c) {
                if (d[c] < 0) {
                    problem = std::string(kNames[c]) + " decreases from " +
                              std::to_string(before[c]) + " to " + std::to_string(col[c]);
                }
            }
            for (int c = 1; c < 4 && problem.empty(); ++c) {
                if (d[c] > d[c - 1]) {
                    problem = std::string(kNames[c]) + " increment " + std::to_string(d[c]) +
                              " exceeds " + kNames[c - 1] + " increment " +
                              std::to_string(d[c - 1]) +
                              " (inner boxes are nested in outer ones)";
                }
            }
            if (!problem.empty()) {
                if (policy == RepairPolicy::strict) {
                    throw ValidationError(name + ", " + ring + ": infeasible target: " + problem);
                }
                d[0] = std::max<std::int64_t>(d[0], 0);
                for (int c = 1; c < 4; ++c) {
                    d[c] = std::clamp<std::int64_t>(d[c], 0, d[c - 1]);
                }
                crossref::FunnelCounts fixed{before[0] + d[0], before[1] + d[1],
                                             before[2] + d[2], before[3] + d[3]};
                if (repairs) {
                    repairs->push_back(name + ", " + ring + ": " + problem + "; generating " +
                                       std::to_string(fixed.total) + "/" +
                                       std::to_string(fixed.keyword) + "/" +
                                       std::to_string(fixed.keyword_instagram) + "/" +
                                       std::to_string(fixed.relevant) + " at " + scale);
                }
                out.funnel_by_scale[r] = fixed;
            }
            prev = out.funnel_by_scale[r];
        }
        realized.push_back(std::move(out));
    }
    return realized;
}

Fixture generate_fixture(const FixtureSpec& spec, RepairPolicy policy)
{
    Fixture fx;
    fx.realized = check_targets(spec, policy, &fx.repairs);

    const social::KeywordFilter filter({spec.term});
    std::vector<std::string> keyword_texts;
    for (const auto& tpl : kKeywordTemplates) {
        auto t = fill_template(tpl, spec.term);
        if (!filter.matches(t)) {
            throw std::logic_error("keyword template does not contain the term");
        }
        keyword_texts.push_back(std::move(t));
    }
    std::vector<std::string> plain_texts;
    for (const auto& t : kPlainTemplates) {
        if (!filter.matches(t)) {
            plain_texts.push_back(t);
        }
    }
    if (plain_texts.empty()) {
        throw ValidationError("term '" + spec.term + "' matches every non-keyword template");
    }

    Rng rng(spec.seed);
    const Placer placer(spec, fx.realized);
    const auto placements = solve(spec, fx.realized, placer);

    const auto& atoms = placer.atoms();

    std::vector<Draft> drafts;
    auto make_post = [&](Category c, const geo::GeoPoint& p, Timestamp ts) {
        Draft d;
        d.post.ts_utc = ts;
        d.post.point = p;
        switch (c) {
        case plain:
            d.post.platform = rng.chance(0.5) ? social::Platform::instagram
                                              : social::Platform::twitter;
            d.post.has_image = rng.chance(d.post.platform == social::Platform::instagram ? 0.7
                                                                                         : 0.3);
            d.post.text = rng.pick(plain_texts);
            break;
        case keyword_other:
            if (rng.chance(0.6)) {
                d.post.platform = social::Platform::twitter;
                d.post.has_image = rng.chance(0.3);
            } else {
                d.post.platform = social::Platform::instagram;
                d.post.has_image = false;
            }
            d.post.text = rng.pick(keyword_texts);
            break;
        case instagram_irrelevant:
        case instagram_relevant:
            d.post.platform = social::Platform::instagram;
            d.post.has_image = true;
            d.post.text = rng.pick(keyword_texts);
            d.label = c == instagram_relevant;
            break;
        }
        return d;
    };

    std::int64_t group_keyword = 0;
    for (const auto& pl : placements) {
        const auto [p, ts] = placer.sample(atoms[pl.atom], rng);
        drafts.push_back(make_post(pl.category, p, ts));
        group_keyword += pl.category != plain ? 1 : 0;
    }

    if (spec.keyword_post_target > 0) {
        if (spec.keyword_post_target < group_keyword) {
            throw ValidationError("keyword_post_target " + std::to_string(spec.keyword_post_target) +
                                  " is below the " + std::to_string(group_keyword) +
                                  " keyword posts the groups already need");
        }
        fx.padding_keyword_posts = spec.keyword_post_target - group_keyword;
    }

    auto background = [&](Category c) {
        const auto spot = placer.sample_background(rng);
        if (!spot) {
            throw ValidationError("no room for background posts: catchments cover the study window");
        }
        auto d = make_post(c, spot->first, spot->second);
        d.label.reset();
        drafts.push_back(std::move(d));
    };
    for (std::int64_t i = 0; i < fx.padding_keyword_posts; ++i) {
        background(rng.chance(0.5) ? keyword_other : instagram_irrelevant);
    }
    for (std::int64_t i = 0; i < spec.background_posts; ++i) {
        if (spec.thinning_rate >= 1.0 || rng.chance(spec.thinning_rate)) {
            background(plain);
        }
    }

    const auto& area = spec.study.area;
    for (std::int64_t i = 0; i < spec.outside_posts; ++i) {
        geo::GeoPoint p{std::round((area.min_lat + rng.unit() * (area.max_lat - area.min_lat)) * 1e6) / 1e6,
                        std::round((area.min_lon + rng.unit() * (area.max_lon - area.min_lon)) * 1e6) / 1e6};
        Timestamp ts{std::chrono::seconds{rng.between(spec.study.start_ts.time_since_epoch().count(),
                                                      spec.study.end_ts.time_since_epoch().count())}};
        if (i % 2 == 0) {
            const auto offset = std::chrono::seconds{rng.between(1, 10 * 86400)};
            ts = rng.chance(0.5) ? spec.study.start_ts - offset : spec.study.end_ts + offset;
        } else if (area.max_lat + 1.0 <= 90.0) {
            p.lat_deg = std::round((area.max_lat + 0.01 + 0.99 * rng.unit()) * 1e6) / 1e6;
        } else {
            p.lat_deg = std::round((area.min_lat - 0.01 - 0.99 * rng.unit()) * 1e6) / 1e6;
        }
        auto d = make_post(rng.chance(0.5) ? keyword_other : plain, p, ts);
        drafts.push_back(std::move(d));
    }

    std::vector<std::size_t> order(drafts.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return drafts[a].post.ts_utc < drafts[b].post.ts_utc;
    });
    for (std::size_t n = 0; n < order.size(); ++n) {
        auto& d = drafts[order[n]];
        char id[32];
        std::snprintf(id, sizeof id, "p%06zu", n + 1);
        d.post.post_id = id;
        if (d.label) {
            fx.labels.push_back({d.post.post_id, *d.label});
        }
        fx.posts.push_back(std::move(d.post));
    }
    std::sort(fx.labels.begin(), fx.labels.end(),
              [](const auto& a, const auto& b) { return a.post_id < b.post_id; });

    static const feed::Resolution kResolutions[] = {
        {1920, 1080}, {1280, 720}, {640, 480}, {270, 150}};
    std::map<std::string, disruption::DisruptionInterval> chosen;
    for (std::size_t i = 0; i < fx.realized.size(); ++i) {
        const auto& g = fx.realized[i];
        for (int k = 1; k <= g.cameras_in_group; ++k) {
            feed::CameraRecord cam;
            cam.camera_id = disruption::city_slug(g.city) + "-g" + std::to_string(i + 1) + "-c" +
                            std::to_string(k);
            cam.name = g.city + " camera " + std::to_string(i + 1) + "." + std::to_string(k);
            cam.city = g.city;
            cam.location = g.center;
            cam.snapshot_url = "http://127.0.0.1:8080/cam/" + cam.camera_id + ".jpg";
            cam.resolution = kResolutions[fx.cameras.size() % 4];
            disruption::DisruptionInterval iv{cam.camera_id, g.start_ts, g.end_ts,
                                              disruption::Cause::gap};
            chosen.emplace(cam.camera_id, iv);
            fx.disruptions.push_back(iv);
            fx.cameras.push_back(std::move(cam));
        }
    }
    fx.groups = disruption::group_cameras(fx.cameras, chosen);
    return fx;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir)
{
    std::string posts;
    for (const auto& p : fixture.posts) {
        posts += social::to_jsonl(p);
        posts.push_back('\n');
    }
    io::write_file(dir / "posts.jsonl", posts);
    io::write_file(dir / "cameras.csv", feed::format_registry(fixture.cameras));
    io::write_file(dir / "disruptions.json",
                   disruption::format_disruptions_json(fixture.disruptions));
    io::write_file(dir / "groups.json", disruption::format_groups_json(fixture.groups));
    io::write_file(dir / "labels.csv", crossref::format_labels_csv(fixture.labels));
}

// ---------------------------------------------------------------------------
// Spec file

namespace {

std::vector<std::int64_t> column(const nlohmann::json& g, const char* key, std::size_t i)
{
    if (!g.contains(key) || !g[key].is_array()) {
        throw ValidationError("group " + std::to_string(i) + ": '" + key +
                              "' must be an array of counts");
    }
    std::vector<std::int64_t> out;
    for (const auto& v : g[key]) {
        if (!v.is_number_integer()) {
            throw ValidationError("group " + std::to_string(i) + ": '" + key +
                                  "' must hold integers");
        }
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

} // namespace

FixtureSpec parse_fixture_spec(std::string_view json_text)
{
    const auto j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ValidationError("fixture spec must be a JSON object");
    }
    FixtureSpec spec;
    try {
        if (j.contains("study_area")) {
            const auto& a = j["study_area"];
            spec.study.area = {a.at("min_lat").get<double>(), a.at("max_lat").get<double>(),
                               a.at("min_lon").get<double>(), a.at("max_lon").get<double>()};
        }
        if (j.contains("study_start")) {
            spec.study.start_ts =
                parse_rfc3339_or_throw(j["study_start"].get<std::string>(), "study_start");
        }
        if (j.contains("study_end")) {
            spec.study.end_ts = parse_rfc3339_or_throw(j["study_end"].get<std::string>(), "study_end");
        }
        if (j.contains("scales_miles")) {
            spec.scales_miles = j["scales_miles"].get<std::vector<double>>();
        }
        spec.term = j.value("term", spec.term);
        spec.keyword_post_target = j.value("keyword_post_target", spec.keyword_post_target);
        spec.background_posts = j.value("background_posts", spec.background_posts);
        spec.thinning_rate = j.value("thinning_rate", spec.thinning_rate);
        spec.outside_posts = j.value("outside_posts", spec.outside_posts);
        spec.seed = j.value("seed", spec.seed);
        const auto placement = j.value("placement", std::string("exclusive"));
        if (placement == "exclusive") {
            spec.placement = Placement::exclusive;
        } else if (placement == "shared") {
            spec.placement = Placement::shared;
        } else {
            throw ValidationError("placement must be 'exclusive' or 'shared'");
        }

        const auto& groups = j.at("groups");
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const auto& g = groups[i];
            GroupTarget t;
            t.city = g.at("city").get<std::string>();
            t.center = {g.at("lat").get<double>(), g.at("lon").get<double>()};
            t.start_ts = parse_rfc3339_or_throw(g.at("start_ts").get<std::string>(), "start_ts");
            t.end_ts = parse_rfc3339_or_throw(g.at("end_ts").get<std::string>(), "end_ts");
            t.cameras_in_group = g.value("cameras_in_group", 1);
            const auto posts = column(g, "posts", i);
            const auto keyword = column(g, "keyword", i);
            const auto instagram = column(g, "instagram", i);
            const auto relevant = column(g, "relevant", i);
            if (keyword.size() != posts.size() || instagram.size() != posts.size() ||
                relevant.size() != posts.size()) {
                throw ValidationError("group " + std::to_string(i) +
                                      ": funnel columns differ in length");
            }
            for (std::size_t s = 0; s < posts.size(); ++s) {
                t.funnel_by_scale.push_back({posts[s], keyword[s], instagram[s], relevant[s]});
            }
            spec.groups.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed fixture spec: ") + e.what());
    }
    return spec;
}

FixtureSpec load_fixture_spec(const std::filesystem::path& path)
{
    return parse_fixture_spec(io::read_file(path));
}

std::string format_fixture_spec(const FixtureSpec& spec)
{
    nlohmann::ordered_json j;
    j["study_area"] = {{"min_lat", spec.study.area.min_lat},
                       {"max_lat", spec.study.area.max_lat},
                       {"min_lon", spec.study.area.min_lon},
                       {"max_lon", spec.study.area.max_lon}};
    j["study_start"] = format_rfc3339(spec.study.start_ts);
    j["study_end"] = format_rfc3339(spec.study.end_ts);
    j["scales_miles"] = spec.scales_miles;
    j["term"] = spec.term;
    j["keyword_post_target"] = spec.keyword_post_target;
    j["background_posts"] = spec.background_posts;
    j["thinning_rate"] = spec.thinning_rate;
    j["outside_posts"] = spec.outside_posts;
    j["seed"] = spec.seed;
    j["placement"] = spec.placement == Placement::exclusive ? "exclusive" : "shared";
    auto groups = nlohmann::ordered_json::array();
    for (const auto& g : spec.groups) {
        nlohmann::ordered_json o;
        o["city"] = g.city;
        o["lat"] = g.center.lat_deg;
        o["lon"] = g.center.lon_deg;
        o["start_ts"] = format_rfc3339(g.start_ts);
        o["end_ts"] = format_rfc3339(g.end_ts);
        o["cameras_in_group"] = g.cameras_in_group;
        std::vector<std::int64_t> posts, keyword, instagram, relevant;
        for (const auto& f : g.funnel_by_scale) {
            posts.push_back(f.total);
            keyword.push_back(f.keyword);
            instagram.push_back(f.keyword_instagram);
            relevant.push_back(f.relevant);
        }
        o["posts"] = posts;
        o["keyword"] = keyword;
        o["instagram"] = instagram;
        o["relevant"] = relevant;
        groups.push_back(std::move(o));
    }
    j["groups"] = std::move(groups);
    return j.dump(2) + "\n";
}

} // namespace camxref::synth
