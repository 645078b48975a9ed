#include "json.hpp"

#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"

namespace tripmode {

using nlohmann::json;

namespace {

constexpr int kMaxTreeDepth = 1000;

json node_json(const Tree& t, std::size_t i, std::size_t k) {
    const auto& n = t.nodes[i];
    if (n.feature < 0) {
        json counts = json::array();
        for (std::size_t c = 0; c < k; ++c) counts.push_back(t.leaf_counts[static_cast<std::size_t>(n.leaf) + c]);
        return {{"counts", counts}};
    }
    return {{"f", n.feature},
            {"thr", n.threshold},
            {"l", node_json(t, static_cast<std::size_t>(n.left), k)},
            {"r", node_json(t, static_cast<std::size_t>(n.right), k)}};
}

int read_node(const json& j, Tree& t, std::size_t k, int depth) {
    if (depth > kMaxTreeDepth) throw SchemaError("model tree exceeds maximum depth");
    if (!j.is_object()) throw SchemaError("model tree node is not an object");
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.contains("counts")) {
        const auto& counts = j.at("counts");
        if (!counts.is_array() || counts.size() != k) throw SchemaError("leaf counts do not match class count");
        t.nodes[static_cast<std::size_t>(id)].leaf = static_cast<int>(t.leaf_counts.size());
        for (const auto& c : counts) {
            if (!c.is_number()) throw SchemaError("leaf count is not a number");
            t.leaf_counts.push_back(c.get<double>());
        }
        return id;
    }
    const int f = j.at("f").get<int>();
    if (f < 0 || f >= static_cast<int>(kFeatureCount)) throw SchemaError("split feature index out of range");
    const double thr = j.at("thr").get<double>();
    const int l = read_node(j.at("l"), t, k, depth + 1);
    const int r = read_node(j.at("r"), t, k, depth + 1);
    auto& n = t.nodes[static_cast<std::size_t>(id)];
    n.feature = f;
    n.threshold = thr;
    n.left = l;
    n.right = r;
    return id;
}

template <typename Array>
json to_array(const Array& a) {
    return json(std::vector<double>(a.begin(), a.end()));
}

FeatureVector read_vector(const json& j, const char* what) {
    if (!j.is_array() || j.size() != kFeatureCount) throw SchemaError(std::string(what) + " must have 16 entries");
    FeatureVector v{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) v[i] = j[i].get<double>();
    return v;
}

}  // namespace

std::string serialize_model(const ForestModel& m) {
    const auto k = static_cast<std::size_t>(m.num_classes());
    json classes = json::array();
    for (Mode mode : modes_of(m.mode_set)) classes.push_back(std::string(mode_name(mode)));
    json trees = json::array();
    for (const auto& t : m.trees) trees.push_back(node_json(t, 0, k));
    json j = {
        {"version", ForestModel::kFormatVersion},
        {"mode_set", std::string(mode_set_name(m.mode_set))},
        {"classes", classes},
        {"feature_order", m.feature_order},
        {"feature_order_version", kFeatureOrderVersion},
        {"standardization", {{"mean", to_array(m.scale.mean)}, {"std", to_array(m.scale.std)}}},
        {"hyperparameters",
         {{"n_trees", m.params.n_trees},
          {"max_depth", m.params.max_depth},
          {"min_samples_split", m.params.min_samples_split},
          {"min_samples_leaf", m.params.min_samples_leaf},
          {"max_features", m.params.max_features},
          {"bootstrap", m.params.bootstrap},
          {"class_weight", m.params.class_weight == ClassWeight::balanced_subsample ? "balanced_subsample" : "none"}}},
        {"seed", m.seed},
        {"importance", to_array(m.importance)},
        {"trees", trees},
    };
    return j.dump() + "\n";
}

ForestModel deserialize_model(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model is not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) throw SchemaError("model root is not an object");
        const int version = j.at("version").get<int>();
        if (version != ForestModel::kFormatVersion) {
            throw SchemaError("unsupported model version " + std::to_string(version));
        }
        ForestModel m;
        const auto set = parse_mode_set(j.at("mode_set").get<std::string>());
        if (!set) throw SchemaError("unknown mode set in model");
        m.mode_set = *set;
        m.feature_order = j.at("feature_order").get<std::vector<std::string>>();
        if (m.feature_order.size() != kFeatureCount) throw SchemaError("feature_order must have 16 entries");
        if (j.at("feature_order_version").get<int>() != kFeatureOrderVersion) {
            throw SchemaError("model feature order version differs from this build");
        }
        const auto& st = j.at("standardization");
        m.scale.mean = read_vector(st.at("mean"), "standardization mean");
        m.scale.std = read_vector(st.at("std"), "standardization std");
        const auto& hp = j.at("hyperparameters");
        m.params.n_trees = hp.at("n_trees").get<int>();
        m.params.max_depth = hp.at("max_depth").get<int>();
        m.params.min_samples_split = hp.at("min_samples_split").get<int>();
        m.params.min_samples_leaf = hp.at("min_samples_leaf").get<int>();
        m.params.max_features = hp.at("max_features").get<int>();
        m.params.bootstrap = hp.at("bootstrap").get<bool>();
        const auto cw = hp.at("class_weight").get<std::string>();
        if (cw == "balanced_subsample") {
            m.params.class_weight = ClassWeight::balanced_subsample;
        } else if (cw == "none") {
            m.params.class_weight = ClassWeight::none;
        } else {
            throw SchemaError("unknown class_weight '" + cw + "'");
        }
        m.seed = j.at("seed").get<std::uint64_t>();
        m.importance = read_vector(j.at("importance"), "importance");
        const auto k = static_cast<std::size_t>(m.num_classes());
        const auto& trees = j.at("trees");
        if (!trees.is_array() || trees.empty()) throw SchemaError("model has no trees");
        for (const auto& tj : trees) {
            Tree t;
            read_node(tj, t, k, 0);
            m.trees.push_back(std::move(t));
        }
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed model: ") + e.what());
    }
}

}  // namespace tripmode
