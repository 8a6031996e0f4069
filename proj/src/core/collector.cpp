#include "collector.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "csv_util.hpp"
#include "errors.hpp"

namespace edgeminer {

std::uint64_t Collector::request(std::vector<Message>& out) {
    const auto id = next_++;
    open_[id];
    for (NodeId dst = 0; dst < n_; ++dst) {
        Message m;
        m.src = self_;
        m.dst = dst;
        m.payload = FMRequest{id};
        out.push_back(std::move(m));
    }
    return id;
}

std::optional<MergedFM> Collector::on_response(NodeId from, const FMResponse& r) {
    auto it = open_.find(r.request);
    if (it == open_.end()) throw ProtocolError("collector: response for unknown request " + std::to_string(r.request));
    it->second[from] = r.partial;
    if (it->second.size() < n_) return std::nullopt;
    std::vector<PartialFM> parts;
    parts.reserve(n_);
    for (auto& [node, part] : it->second) parts.push_back(std::move(part));
    open_.erase(it);
    return merge_columns(parts);
}

void Collector::fail_if_incomplete(std::uint64_t request) const {
    auto it = open_.find(request);
    if (it == open_.end()) return;
    std::ostringstream msg;
    msg << "collection " << request << " incomplete; no response from node(s)";
    for (NodeId node = 0; node < n_; ++node)
        if (!it->second.count(node)) msg << ' ' << node;
    throw MergeError(msg.str());
}

bool DirectlyFollowsGraph::has_edge(std::uint32_t from, std::uint32_t to) const {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const DfgEdge& e) { return e.from == from && e.to == to; });
}

DirectlyFollowsGraph build_dfg(const MergedFM& fm) {
    DirectlyFollowsGraph g;
    g.activities = fm.size();
    for (std::uint32_t i = 0; i < fm.size(); ++i)
        for (std::uint32_t j = 0; j < fm.size(); ++j)
            if (fm.at(i, j) > 0) g.edges.push_back({i, j, fm.at(i, j)});
    for (auto s : fm.starts()) g.edges.push_back({g.source(), s, 1});
    for (auto e : fm.ends()) g.edges.push_back({e, g.sink(), 1});
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + '"';
}

} // namespace

std::string to_dot(const DirectlyFollowsGraph& dfg, std::span<const std::string> names) {
    std::ostringstream out;
    out << "digraph dfg {\n  rankdir=LR;\n";
    out << "  n" << dfg.source() << " [label=\"\" shape=circle style=filled fillcolor=green];\n";
    out << "  n" << dfg.sink() << " [label=\"\" shape=doublecircle style=filled fillcolor=orange];\n";
    for (std::size_t a = 0; a < dfg.activities; ++a)
        out << "  n" << a << " [label=" << dot_quote(a < names.size() ? names[a] : std::to_string(a))
            << " shape=box];\n";
    for (const auto& e : dfg.edges) {
        out << "  n" << e.from << " -> n" << e.to;
        if (e.from < dfg.activities && e.to < dfg.activities) out << " [label=\"" << e.weight << "\"]";
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::vector<double> dependency_measures(const MergedFM& fm) {
    const std::size_t n = fm.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const auto ab = static_cast<double>(fm.at(a, b));
            if (a == b) {
                d[a * n + b] = ab / (ab + 1.0);
            } else {
                const auto ba = static_cast<double>(fm.at(b, a));
                d[a * n + b] = (ab - ba) / (ab + ba + 1.0);
            }
        }
    }
    return d;
}

std::string dependency_csv(const std::vector<double>& dependency, std::span<const std::string> names) {
    const std::size_t n = names.size();
    if (dependency.size() != n * n) throw std::invalid_argument("dependency_csv: size mismatch");
    std::ostringstream out;
    out << "activity";
    for (const auto& name : names) out << ',' << csv_escape(name);
    out << '\n' << std::setprecision(6) << std::fixed;
    for (std::size_t a = 0; a < n; ++a) {
        out << csv_escape(names[a]);
        for (std::size_t b = 0; b < n; ++b) out << ',' << dependency[a * n + b];
        out << '\n';
    }
    return out.str();
}

} // namespace edgeminer
