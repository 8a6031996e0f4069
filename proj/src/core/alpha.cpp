#include "alpha.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace edgeminer {

namespace {

class Bits {
public:
    explicit Bits(std::size_t size = 0) : words_((size + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

    bool none() const {
        return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }
    Bits minus(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
        return r;
    }
    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            for (auto w = words_[k]; w != 0; w &= w - 1) f(k * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        }
    }

private:
    std::vector<std::uint64_t> words_;
};

// Vertices 0..m-1 are left copies, m..2m-1 right copies of the activities in T_L.
// A clique touching both sides is an (A, B) pair satisfying the place predicate.
struct CliqueSearch {
    std::vector<Bits> adj;
    std::set<std::vector<std::size_t>> found;
    std::size_t cap;

    void expand(std::vector<std::size_t>& r, Bits p, Bits x) {
        if (p.none() && x.none()) {
            auto clique = r;
            std::sort(clique.begin(), clique.end());
            found.insert(std::move(clique));
            if (found.size() > cap)
                throw MiningError("alpha: more than " + std::to_string(cap) +
                                  " maximal place candidates; relation structure too dense");
            return;
        }
        // Tomita pivot: the vertex of P u X with the most neighbours in P.
        std::size_t pivot = 0;
        std::size_t best = 0;
        bool have = false;
        auto consider = [&](std::size_t u) {
            const auto c = (p & adj[u]).count();
            if (!have || c > best) {
                pivot = u;
                best = c;
                have = true;
            }
        };
        p.for_each(consider);
        x.for_each(consider);
        std::vector<std::size_t> candidates;
        p.minus(adj[pivot]).for_each([&](std::size_t v) { candidates.push_back(v); });
        for (auto v : candidates) {
            r.push_back(v);
            expand(r, p & adj[v], x & adj[v]);
            r.pop_back();
            p.reset(v);
            x.set(v);
        }
    }
};

std::string set_label(const ActivitySet& s, std::span<const std::string> names) {
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ',';
        out += names[s[k]];
    }
    return out + "}";
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

} // namespace

PetriNet alpha(const MergedFM& fm, std::span<const std::string> names, const AlphaOptions& options) {
    const std::size_t n = fm.size();
    if (names.size() != n) throw std::invalid_argument("alpha: names do not match footprint size");

    PetriNet net;
    for (ActivityId a = 0; a < n; ++a) {
        bool occurs = fm.starts().count(a) > 0 || fm.ends().count(a) > 0;
        for (std::size_t b = 0; b < n && !occurs; ++b) occurs = fm.at(a, b) > 0 || fm.at(b, a) > 0;
        if (occurs) net.transitions.push_back(a);
    }
    if (net.transitions.empty()) throw MiningError("alpha: footprint has no occurring activity");

    const auto& t = net.transitions;
    const std::size_t m = t.size();
    auto no_succession = [&](ActivityId a, ActivityId b) { return fm.at(a, b) == 0 && fm.at(b, a) == 0; };
    auto causal = [&](ActivityId a, ActivityId b) { return fm.at(a, b) > 0 && fm.at(b, a) == 0; };

    CliqueSearch search;
    search.cap = options.max_pairs;
    search.adj.assign(2 * m, Bits(2 * m));
    std::vector<bool> usable(m);
    for (std::size_t i = 0; i < m; ++i) usable[i] = no_succession(t[i], t[i]);
    for (std::size_t i = 0; i < m; ++i) {
        if (!usable[i]) continue;
        for (std::size_t j = 0; j < m; ++j) {
            if (!usable[j]) continue;
            if (i != j && no_succession(t[i], t[j])) {
                search.adj[i].set(j);
                search.adj[m + i].set(m + j);
            }
            if (causal(t[i], t[j])) {
                search.adj[i].set(m + j);
                search.adj[m + j].set(i);
            }
        }
    }

    // Every clique with both sides nonempty contains a causal edge; seed from each.
    for (std::size_t i = 0; i < m; ++i) {
        search.adj[i].for_each([&](std::size_t v) {
            if (v < m) return;
            std::vector<std::size_t> r{i, v};
            search.expand(r, search.adj[i] & search.adj[v], Bits(2 * m));
        });
    }

    for (const auto& clique : search.found) {
        ActivitySet a_side;
        ActivitySet b_side;
        for (auto v : clique) (v < m ? a_side : b_side).push_back(t[v % m]);
        net.maximal_pairs.emplace_back(std::move(a_side), std::move(b_side));
    }
    std::sort(net.maximal_pairs.begin(), net.maximal_pairs.end());

    net.places.push_back({"i_L", {}, {fm.starts().begin(), fm.starts().end()}});
    for (const auto& [a_side, b_side] : net.maximal_pairs)
        net.places.push_back({"p_(" + set_label(a_side, names) + "," + set_label(b_side, names) + ")", a_side, b_side});
    net.places.push_back({"o_L", {fm.ends().begin(), fm.ends().end()}, {}});

    for (std::size_t p = 0; p < net.places.size(); ++p) {
        for (auto a : net.places[p].inputs) net.arcs.push_back({Arc::Direction::transition_to_place, p, a});
        for (auto b : net.places[p].outputs) net.arcs.push_back({Arc::Direction::place_to_transition, p, b});
    }
    std::sort(net.arcs.begin(), net.arcs.end());
    return net;
}

std::string to_dot(const PetriNet& net, std::span<const std::string> names) {
    std::ostringstream out;
    out << "digraph petrinet {\n  rankdir=LR;\n";
    for (std::size_t p = 0; p < net.places.size(); ++p) {
        out << "  p" << p << " [shape=circle label=" << dot_quote(net.places[p].name) << "];\n";
    }
    for (auto a : net.transitions) out << "  t" << a << " [shape=box label=" << dot_quote(names[a]) << "];\n";
    for (const auto& arc : net.arcs) {
        if (arc.direction == Arc::Direction::place_to_transition)
            out << "  p" << arc.place << " -> t" << arc.transition << ";\n";
        else
            out << "  t" << arc.transition << " -> p" << arc.place << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_pnml(const PetriNet& net, std::span<const std::string> names) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<pnml>\n"
        << "  <net id=\"alpha\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n"
        << "    <page id=\"page0\">\n";
    for (std::size_t p = 0; p < net.places.size(); ++p) {
        out << "      <place id=\"p" << p << "\"><name><text>" << xml_escape(net.places[p].name) << "</text></name>";
        if (p == net.source()) out << "<initialMarking><text>1</text></initialMarking>";
        out << "</place>\n";
    }
    for (auto a : net.transitions) {
        out << "      <transition id=\"t" << a << "\"><name><text>" << xml_escape(names[a])
            << "</text></name></transition>\n";
    }
    std::size_t k = 0;
    for (const auto& arc : net.arcs) {
        const bool forward = arc.direction == Arc::Direction::place_to_transition;
        const std::string place = "p" + std::to_string(arc.place);
        const std::string transition = "t" + std::to_string(arc.transition);
        out << "      <arc id=\"a" << k++ << "\" source=\"" << (forward ? place : transition) << "\" target=\""
            << (forward ? transition : place) << "\"/>\n";
    }
    out << "    </page>\n  </net>\n</pnml>\n";
    return out.str();
}

} // namespace edgeminer
