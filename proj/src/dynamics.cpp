#include "netcollab/dynamics.hpp"

#include "netcollab/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace netcollab {

using nlohmann::json;

std::string_view to_string(DynamicsKind kind) {
    return kind == DynamicsKind::EvolutionaryGame ? "EG" : "RN";
}

DynamicsKind parse_dynamics_kind(std::string_view text) {
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
    if (key == "EG") return DynamicsKind::EvolutionaryGame;
    if (key == "RN") return DynamicsKind::ResistorNetwork;
    throw ConfigError("unknown dynamics \"" + std::string(text) + "\"; expected EG or RN");
}

EgData simulate_eg(const Network& net, int sequences, int rounds, std::uint64_t seed) {
    if (sequences < 1 || rounds < 1) throw DomainError("simulate_eg needs sequences >= 1 and rounds >= 1");
    const int n = net.size();
    const auto nbrs = net.neighbor_lists();
    const Eigen::Matrix2d p = payoff_matrix();

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    EgData data;
    data.sequences = sequences;
    data.rounds = rounds;
    data.cooperates.resize(sequences * rounds, n);
    data.payoffs.resize(sequences * rounds, n);

    std::vector<std::uint8_t> coop(n), next(n);
    Eigen::VectorXd payoff(n);
    for (int s = 0; s < sequences; ++s) {
        for (int i = 0; i < n; ++i) coop[i] = coin(rng) ? 1 : 0;
        for (int t = 0; t < rounds; ++t) {
            for (int i = 0; i < n; ++i) {
                double y = 0.0;
                for (int j : nbrs[i]) y += p(coop[i] ? 0 : 1, coop[j] ? 0 : 1);
                payoff[i] = y;
            }
            const int row = s * rounds + t;
            for (int i = 0; i < n; ++i) data.cooperates(row, i) = coop[i];
            data.payoffs.row(row) = payoff.transpose();

            // Synchronous Fermi imitation of one random neighbour.
            for (int i = 0; i < n; ++i) {
                next[i] = coop[i];
                if (nbrs[i].empty()) continue;
                const int j = nbrs[i][std::uniform_int_distribution<std::size_t>(0, nbrs[i].size() - 1)(rng)];
                if (unit(rng) < fermi_adoption_probability(payoff[i], payoff[j])) next[i] = coop[j];
            }
            std::swap(coop, next);
        }
    }
    return data;
}

RnData simulate_rn(const Network& net, int sequences, int samples, std::uint64_t seed) {
    if (sequences < 1 || samples < 1) throw DomainError("simulate_rn needs sequences >= 1 and samples >= 1");
    const int n = net.size();
    const Eigen::MatrixXd a = net.adjacency().cast<double>();
    const Eigen::VectorXd degree = a.rowwise().sum();
    const double horizon = 10.0 * 2.0 * std::numbers::pi / kBaseFrequency;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> detune(0.0, kMaxDetuning);
    std::uniform_real_distribution<double> when(0.0, horizon);

    RnData data;
    data.sequences = sequences;
    data.samples = samples;
    data.times.resize(sequences, samples);
    data.perturbations.resize(sequences, n);
    data.voltages.resize(sequences * samples, n);
    data.currents.resize(sequences * samples, n);

    for (int s = 0; s < sequences; ++s) {
        for (int i = 0; i < n; ++i) data.perturbations(s, i) = detune(rng);
        std::vector<double> ts(samples);
        for (double& t : ts) t = when(rng);
        std::sort(ts.begin(), ts.end());
        for (int k = 0; k < samples; ++k) {
            data.times(s, k) = ts[k];
            const int row = s * samples + k;
            for (int i = 0; i < n; ++i)
                data.voltages(row, i) =
                    kVoltagePeak * std::sin((kBaseFrequency + data.perturbations(s, i)) * ts[k]);
            // I_i = sum_j a_ij (V_i - V_j)
            const Eigen::VectorXd v = data.voltages.row(row).transpose();
            data.currents.row(row) = (degree.cwiseProduct(v) - a * v).transpose();
        }
    }
    return data;
}

NrProblem build_eg_problem(const EgData& data, const Network& net) {
    const int n = net.size();
    if (data.size() != n || data.payoffs.cols() != n || data.payoffs.rows() != data.cooperates.rows())
        throw DimensionError("EG data shape does not match a " + std::to_string(n) + "-node network");
    const Eigen::Matrix2d p = payoff_matrix();
    const Eigen::Index rows = data.cooperates.rows();

    NrProblem problem;
    problem.kind = DynamicsKind::EvolutionaryGame;
    problem.truth = net;
    problem.design.resize(n);
    problem.target.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd u(rows, n);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (int j = 0; j < n; ++j)
                u(r, j) = data.strategy(r, i).dot(p * data.strategy(r, j));
        problem.design[i] = std::move(u);
        problem.target[i] = data.payoffs.col(i);
    }
    return problem;
}

NrProblem build_rn_problem(const RnData& data, const Network& net) {
    const int n = net.size();
    if (data.size() != n || data.currents.cols() != n || data.currents.rows() != data.voltages.rows())
        throw DimensionError("RN data shape does not match a " + std::to_string(n) + "-node network");

    NrProblem problem;
    problem.kind = DynamicsKind::ResistorNetwork;
    problem.truth = net;
    problem.design.resize(n);
    problem.target.resize(n);
    for (int i = 0; i < n; ++i) {
        problem.design[i] = (-data.voltages).colwise() + data.voltages.col(i);
        problem.target[i] = data.currents.col(i);
    }
    return problem;
}

NrProblem Dataset::problem() const {
    return std::visit(
        [&](const auto& d) -> NrProblem {
            if constexpr (std::is_same_v<std::decay_t<decltype(d)>, EgData>)
                return build_eg_problem(d, network);
            else
                return build_rn_problem(d, network);
        },
        data);
}

Dataset make_dataset(std::string id, std::string network_name, Network network,
                     DynamicsKind kind, int sequences, int rounds, std::uint64_t seed) {
    Dataset ds;
    ds.id = std::move(id);
    ds.network_name = std::move(network_name);
    ds.kind = kind;
    ds.sequences = sequences;
    ds.rounds = rounds;
    ds.seed = seed;
    if (kind == DynamicsKind::EvolutionaryGame)
        ds.data = simulate_eg(network, sequences, rounds, seed);
    else
        ds.data = simulate_rn(network, sequences, rounds, seed);
    ds.network = std::move(network);
    return ds;
}

namespace {

template <typename Derived>
json row_major(const Eigen::MatrixBase<Derived>& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

template <typename Scalar>
MatrixX<Scalar> from_row_major(const json& values, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (!values.is_array() || static_cast<Eigen::Index>(values.size()) != rows * cols)
        throw DimensionError(std::string("dataset field ") + what + " should hold " +
                             std::to_string(rows * cols) + " values");
    MatrixX<Scalar> m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = values[r * cols + c].get<Scalar>();
    return m;
}

}  // namespace

std::string dataset_to_json(const Dataset& ds) {
    const int n = ds.network.size();
    json j;
    j["format"] = "netcollab-dataset";
    j["version"] = 1;
    j["id"] = ds.id;
    j["network"] = ds.network_name;
    j["dynamics"] = std::string(to_string(ds.kind));
    j["sequences"] = ds.sequences;
    j["rounds"] = ds.rounds;
    j["seed"] = ds.seed;
    j["nodes"] = n;
    json edges = json::array();
    for (auto [u, v] : ds.network.edges()) edges.push_back({u, v});
    j["edges"] = std::move(edges);
    if (const auto& truth = ds.network.truth_partition()) {
        j["truth_partition"] = std::vector<int>(truth->data(), truth->data() + truth->size());
    }
    j["design_shape"] = {ds.sequences * ds.rounds, n};
    if (const auto* eg = std::get_if<EgData>(&ds.data)) {
        j["eg"] = {{"cooperates", row_major(eg->cooperates.cast<int>())},
                   {"payoffs", row_major(eg->payoffs)}};
    } else {
        const auto& rn = std::get<RnData>(ds.data);
        j["rn"] = {{"times", row_major(rn.times)},
                   {"perturbations", row_major(rn.perturbations)},
                   {"voltages", row_major(rn.voltages)},
                   {"currents", row_major(rn.currents)}};
    }
    return j.dump() + "\n";
}

Dataset dataset_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("dataset is not valid JSON: ") + e.what());
    }
    try {
        if (j.value("format", "") != "netcollab-dataset") throw ParseError("not a netcollab dataset document");
        Dataset ds;
        ds.id = j.at("id").get<std::string>();
        ds.network_name = j.at("network").get<std::string>();
        ds.kind = parse_dynamics_kind(j.at("dynamics").get<std::string>());
        ds.sequences = j.at("sequences").get<int>();
        ds.rounds = j.at("rounds").get<int>();
        ds.seed = j.at("seed").get<std::uint64_t>();
        const int n = j.at("nodes").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        std::optional<CommunityPartition> truth;
        if (j.contains("truth_partition")) {
            const auto labels = j["truth_partition"].get<std::vector<int>>();
            truth = Eigen::Map<const CommunityPartition>(labels.data(), labels.size());
        }
        ds.network = Network::from_edges(n, edges, std::move(truth));

        const Eigen::Index rows = Eigen::Index(ds.sequences) * ds.rounds;
        if (ds.kind == DynamicsKind::EvolutionaryGame) {
            const auto& eg = j.at("eg");
            EgData d;
            d.sequences = ds.sequences;
            d.rounds = ds.rounds;
            d.cooperates = from_row_major<int>(eg.at("cooperates"), rows, n, "eg.cooperates").cast<std::uint8_t>();
            d.payoffs = from_row_major<double>(eg.at("payoffs"), rows, n, "eg.payoffs");
            ds.data = std::move(d);
        } else {
            const auto& rn = j.at("rn");
            RnData d;
            d.sequences = ds.sequences;
            d.samples = ds.rounds;
            d.times = from_row_major<double>(rn.at("times"), ds.sequences, ds.rounds, "rn.times");
            d.perturbations = from_row_major<double>(rn.at("perturbations"), ds.sequences, n, "rn.perturbations");
            d.voltages = from_row_major<double>(rn.at("voltages"), rows, n, "rn.voltages");
            d.currents = from_row_major<double>(rn.at("currents"), rows, n, "rn.currents");
            ds.data = std::move(d);
        }
        return ds;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed dataset: ") + e.what());
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << dataset_to_json(dataset);
    if (!out) throw IoError("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return dataset_from_json(buffer.str());
}

}  // namespace netcollab
