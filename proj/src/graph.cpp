#include "netcollab/graph.hpp"

#include "netcollab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace netcollab {

CommunityPartition canonical_labels(const CommunityPartition& labels) {
    std::unordered_map<int, int> remap;
    CommunityPartition out(labels.size());
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    return out;
}

int community_count(const CommunityPartition& labels) {
    std::set<int> distinct(labels.data(), labels.data() + labels.size());
    return static_cast<int>(distinct.size());
}

std::vector<std::vector<int>> communities(const CommunityPartition& labels) {
    const CommunityPartition canon = canonical_labels(labels);
    std::vector<std::vector<int>> groups(canon.size() == 0 ? 0 : canon.maxCoeff() + 1);
    for (Eigen::Index i = 0; i < canon.size(); ++i) groups[canon[i]].push_back(static_cast<int>(i));
    return groups;
}

Network::Network(Adjacency adjacency, std::optional<CommunityPartition> truth)
    : adjacency_(std::move(adjacency)), truth_(std::move(truth)) {
    if (!is_symmetric_zero_diagonal(adjacency_))
        throw DimensionError("adjacency must be square, symmetric and zero-diagonal");
    if ((adjacency_.array() > 1).any()) throw DomainError("adjacency must be binary");
    if (truth_ && truth_->size() != adjacency_.rows())
        throw DimensionError("truth partition has " + std::to_string(truth_->size()) +
                             " labels for " + std::to_string(adjacency_.rows()) + " nodes");
}

Network Network::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                            std::optional<CommunityPartition> truth) {
    Adjacency a = Adjacency::Zero(n, n);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw RangeError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") outside node range " + std::to_string(n));
        if (u == v) continue;
        a(u, v) = 1;
        a(v, u) = 1;
    }
    return Network(std::move(a), std::move(truth));
}

long Network::edge_count() const {
    return adjacency_.cast<long>().sum() / 2;
}

Eigen::VectorXi Network::degrees() const {
    return adjacency_.cast<int>().rowwise().sum();
}

std::vector<std::vector<int>> Network::neighbor_lists() const {
    std::vector<std::vector<int>> nbrs(size());
    for (int i = 0; i < size(); ++i)
        for (int j = 0; j < size(); ++j)
            if (adjacency_(i, j)) nbrs[i].push_back(j);
    return nbrs;
}

std::vector<std::pair<int, int>> Network::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < size(); ++i)
        for (int j = i + 1; j < size(); ++j)
            if (adjacency_(i, j)) out.emplace_back(i, j);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return b < e ? std::string(b, e) : std::string();
}

std::optional<long> parse_nodes_header(const std::string& comment) {
    // "# nodes: 34" or "# nodes 34"
    std::string body = trim(comment.substr(1));
    std::string lowered = body;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lowered.rfind("nodes", 0) != 0) return std::nullopt;
    std::string rest = trim(body.substr(5));
    if (!rest.empty() && rest.front() == ':') rest = trim(rest.substr(1));
    char* end = nullptr;
    long n = std::strtol(rest.c_str(), &end, 10);
    if (end == rest.c_str() || *end != '\0' || n <= 0) return std::nullopt;
    return n;
}

}  // namespace

Network load_edge_list(const std::filesystem::path& path,
                       const std::optional<std::filesystem::path>& truth_path,
                       LoadDiagnostics* diagnostics) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list " + path.string());

    std::optional<long> declared;
    std::vector<std::pair<long, long>> raw;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            if (auto n = parse_nodes_header(t)) declared = n;
            continue;
        }
        std::istringstream fields(t);
        long u = -1, v = -1;
        std::string extra;
        if (!(fields >> u >> v) || (fields >> extra) || u < 0 || v < 0)
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": expected two non-negative node ids, got \"" + t + "\"");
        raw.emplace_back(u, v);
    }
    if (raw.empty()) throw ParseError(path.string() + ": no edges");

    long min_id = raw.front().first;
    long max_id = 0;
    for (auto [u, v] : raw) {
        min_id = std::min({min_id, u, v});
        max_id = std::max({max_id, u, v});
    }
    const long base = min_id >= 1 ? 1 : 0;
    const long n = declared ? *declared : max_id - base + 1;
    if (max_id - base >= n)
        throw RangeError(path.string() + ": node id " + std::to_string(max_id) +
                         " exceeds declared node count " + std::to_string(n));

    LoadDiagnostics diag;
    diag.one_based = base == 1;
    Adjacency a = Adjacency::Zero(n, n);
    for (auto [u, v] : raw) {
        u -= base;
        v -= base;
        if (u == v) {
            ++diag.self_loops;
            continue;
        }
        if (a(u, v)) {
            ++diag.duplicates;
            continue;
        }
        a(u, v) = 1;
        a(v, u) = 1;
    }
    if (diagnostics) *diagnostics = diag;

    std::optional<CommunityPartition> truth;
    if (truth_path) {
        truth = load_partition(*truth_path);
        if (truth->size() != n)
            throw DimensionError(truth_path->string() + ": " + std::to_string(truth->size()) +
                                 " labels for " + std::to_string(n) + " nodes");
    }
    return Network(std::move(a), std::move(truth));
}

CommunityPartition load_partition(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open partition file " + path.string());
    std::vector<int> labels;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::istringstream fields(t);
        int label = 0;
        std::string extra;
        if (!(fields >> label) || (fields >> extra))
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": expected one integer label, got \"" + t + "\"");
        labels.push_back(label);
    }
    if (labels.empty()) throw ParseError(path.string() + ": no labels");
    return canonical_labels(Eigen::Map<CommunityPartition>(labels.data(), labels.size()));
}

std::filesystem::path data_directory() {
    if (const char* env = std::getenv("NETCOLLAB_DATA"); env && *env) return env;
#ifdef NETCOLLAB_DATA_DIR
    return NETCOLLAB_DATA_DIR;
#else
    return "data";
#endif
}

std::vector<std::string> known_network_names() {
    return {"ZK", "dolphin", "polbooks", "football", "ER", "BA", "NW", "WS"};
}

Network load_named_network(std::string_view name, int synthetic_n, std::uint64_t seed) {
    std::string key(name);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });

    const std::pair<const char*, const char*> real[] = {
        {"zk", "zk"}, {"karate", "zk"}, {"dolphin", "dolphin"}, {"dolphins", "dolphin"},
        {"polbooks", "polbooks"}, {"football", "football"}};
    for (auto [alias, stem] : real) {
        if (key != alias) continue;
        const auto dir = data_directory();
        const auto edges = dir / (std::string(stem) + ".edges");
        const auto truth = dir / (std::string(stem) + ".truth");
        if (!std::filesystem::exists(edges))
            throw IoError("network " + std::string(name) + " needs " + edges.string() +
                          " (edge list) and " + truth.string() + " (one label per node)");
        return load_edge_list(edges, std::filesystem::exists(truth)
                                         ? std::optional<std::filesystem::path>(truth)
                                         : std::nullopt);
    }

    const int n = synthetic_n;
    if (key == "er") return generate_er(n, 6.0 / (n - 1), seed);
    if (key == "ba") return generate_ba(n, 3, seed);
    if (key == "ws") return generate_ws(n, 6, 0.1, seed);
    if (key == "nw") return generate_nw(n, 4, 2.0 / (n - 1 - 4), seed);

    std::string known;
    for (const auto& k : known_network_names()) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown network \"" + std::string(name) + "\"; known: " + known);
}

Network generate_er(int n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("ER edge probability must lie in [0, 1]");
    if (n < 2) throw DomainError("ER needs at least two nodes");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution link(p);
    Adjacency a = Adjacency::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (link(rng)) a(i, j) = a(j, i) = 1;
    return Network(std::move(a));
}

Network generate_ba(int n, int m, std::uint64_t seed) {
    if (m < 1 || m >= n) throw DomainError("BA requires 1 <= m < n");
    std::mt19937_64 rng(seed);
    Adjacency a = Adjacency::Zero(n, n);
    // Every edge endpoint appears once; sampling from it is degree-proportional.
    std::vector<int> endpoints;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            a(i, j) = a(j, i) = 1;
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    for (int v = m; v < n; ++v) {
        std::set<int> targets;
        while (static_cast<int>(targets.size()) < m) {
            int t;
            if (endpoints.empty()) {
                t = std::uniform_int_distribution<int>(0, v - 1)(rng);
            } else {
                t = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
            }
            targets.insert(t);
        }
        for (int t : targets) {
            a(v, t) = a(t, v) = 1;
            endpoints.push_back(v);
            endpoints.push_back(t);
        }
    }
    return Network(std::move(a));
}

namespace {

Adjacency ring_lattice(int n, int k) {
    if (k % 2 != 0) throw DomainError("ring degree k must be even");
    if (k < 0 || k >= n) throw DomainError("ring degree k must satisfy 0 <= k < n");
    Adjacency a = Adjacency::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int s = 1; s <= k / 2; ++s) {
            const int j = (i + s) % n;
            a(i, j) = a(j, i) = 1;
        }
    return a;
}

}  // namespace

Network generate_ws(int n, int k, double p_rewire, std::uint64_t seed) {
    if (!(p_rewire >= 0.0 && p_rewire <= 1.0)) throw DomainError("rewiring probability must lie in [0, 1]");
    Adjacency a = ring_lattice(n, k);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution rewire(p_rewire);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int s = 1; s <= k / 2; ++s)
        for (int i = 0; i < n; ++i) {
            const int j = (i + s) % n;
            if (!a(i, j) || !rewire(rng)) continue;
            if (a.row(i).cast<int>().sum() >= n - 1) continue;
            int t;
            do {
                t = pick(rng);
            } while (t == i || a(i, t));
            a(i, j) = a(j, i) = 0;
            a(i, t) = a(t, i) = 1;
        }
    return Network(std::move(a));
}

Network generate_nw(int n, int k, double p_add, std::uint64_t seed) {
    if (!(p_add >= 0.0 && p_add <= 1.0)) throw DomainError("shortcut probability must lie in [0, 1]");
    Adjacency a = ring_lattice(n, k);
    const Adjacency lattice = a;
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution add(p_add);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!lattice(i, j) && add(rng)) a(i, j) = a(j, i) = 1;
    return Network(std::move(a));
}

}  // namespace netcollab
