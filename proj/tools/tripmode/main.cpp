#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "tripmode/aggregate.hpp"
#include "tripmode/classifier.hpp"
#include "tripmode/error.hpp"
#include "tripmode/features.hpp"
#include "tripmode/ingest.hpp"
#include "tripmode/network.hpp"
#include "tripmode/pipeline.hpp"
#include "tripmode/rng.hpp"
#include "tripmode/stops.hpp"
#include "tripmode/synth.hpp"
#include "tripmode/text.hpp"
#include "tripmode/trips.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tripmode;
using tripmode::cli::Manifest;

namespace {

struct Globals {
    std::string utc_offset = "0";
    std::uint64_t seed = 1;
    std::string preset = "lri15";
    std::string mode_set = "five";
    unsigned threads = 1;
};

std::int64_t parse_utc_offset(const std::string& s) {
    std::string_view v = text::trim(s);
    int sign = 1;
    if (!v.empty() && (v.front() == '+' || v.front() == '-')) {
        sign = v.front() == '-' ? -1 : 1;
        v.remove_prefix(1);
    }
    std::int64_t hours = 0;
    std::int64_t minutes = 0;
    const auto colon = v.find(':');
    const auto h = text::to_int(v.substr(0, colon));
    if (!h) throw ValidationError("bad --utc-offset '" + s + "': use hours or +HH:MM");
    hours = *h;
    if (colon != std::string_view::npos) {
        const auto m = text::to_int(v.substr(colon + 1));
        if (!m || *m < 0 || *m >= 60) throw ValidationError("bad --utc-offset minutes in '" + s + "'");
        minutes = *m;
    }
    if (hours < 0 || hours > 14) throw ValidationError("--utc-offset must lie within -14:00..+14:00");
    return sign * (hours * 3600 + minutes * 60);
}

ModeSet mode_set_of(const Globals& g) {
    const auto s = parse_mode_set(g.mode_set);
    if (!s) throw ValidationError("--mode-set must be 'four' or 'five'");
    return *s;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

std::string read_text(const std::string& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    body(out);
    if (!out) throw DataError("write failed for '" + path + "'");
}

std::string in_dir(const std::string& dir, const char* name) { return (fs::path(dir) / name).string(); }

IngestResult load_pings(const std::string& path) {
    auto in = open_in(path);
    return parse_pings(in);
}

std::vector<RosterRow> load_roster(const std::string& path) {
    auto in = open_in(path);
    return read_roster(in);
}

ordered_json metrics_json(const EvalReport& r, ModeSet set) {
    const auto& modes = modes_of(set);
    ordered_json classes = ordered_json::object();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        classes[std::string(mode_name(modes[c]))] = {{"precision", m.precision},
                                                     {"recall", m.recall},
                                                     {"f1", m.f1},
                                                     {"support", m.support},
                                                     {"undefined", m.undefined}};
    }
    ordered_json j = {{"samples", r.samples()},
                      {"accuracy", r.accuracy},
                      {"macro_f1", r.macro_f1},
                      {"per_class", classes},
                      {"confusion", r.confusion}};
    if (!r.fold_accuracies.empty()) {
        j["fold_accuracies"] = r.fold_accuracies;
        j["mean_fold_accuracy"] = r.mean_fold_accuracy;
    }
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    std::string out;
    std::string config;
    std::optional<int> devices;
    std::optional<int> days;
    std::optional<double> lri_fixed;
    bool no_noise = false;
};

void run_synth(const Globals& g, const SynthArgs& a, bool seed_given, bool offset_given) {
    synth::CorpusConfig cfg;
    Manifest man("synth");
    if (!a.config.empty()) {
        cfg = synth::corpus_config_from_json(read_text(a.config));
        man.input("config", a.config);
    }
    if (seed_given || a.config.empty()) cfg.seed = g.seed;
    if (offset_given) cfg.utc_offset_s = parse_utc_offset(g.utc_offset);
    if (a.devices) cfg.devices = *a.devices;
    if (a.days) cfg.days = *a.days;
    if (a.lri_fixed) cfg.persona.fixed_lri_s = *a.lri_fixed;
    if (a.no_noise) cfg.persona.noise = false;
    cfg.validate();

    const auto corpus = synth::generate_corpus(cfg, g.threads);
    const auto roster = synth::truth_roster(corpus);
    auto emit = [&](const char* name, const std::function<void(std::ostream&)>& body) {
        const auto path = in_dir(a.out, name);
        write_file(path, body);
        man.output(path);
    };
    emit("pings.csv", [&](std::ostream& o) { write_pings(o, corpus.trajectories); });
    emit("diary.csv", [&](std::ostream& o) { write_diary(o, corpus.diary); });
    emit("truth_roster.csv", [&](std::ostream& o) { write_roster(o, roster); });
    emit("network.ndjson", [&](std::ostream& o) { write_network(o, corpus.world.network); });
    emit("zones.ndjson", [&](std::ostream& o) { write_zones(o, corpus.zones); });
    emit("survey.csv", [&](std::ostream& o) {
        o << "zone_id,mode,share\n";
        for (const auto& e : corpus.survey) o << e.zone_id << ',' << e.mode << ',' << text::fmt_fixed(e.share, 6) << '\n';
    });
    emit("synth_config.json", [&](std::ostream& o) { o << synth::to_json(cfg); });

    std::size_t pings = 0;
    for (const auto& t : corpus.trajectories) pings += t.pings.size();
    man.seeds()["corpus"] = cfg.seed;
    man.params()["devices"] = cfg.devices;
    man.params()["days"] = cfg.days;
    man.params()["utc_offset_s"] = cfg.utc_offset_s;
    man.counts()["pings"] = pings;
    man.counts()["trips"] = corpus.truth.size();
    man.counts()["zones"] = corpus.zones.size();
    man.write(in_dir(a.out, "manifest.json"));
}

// ---------------------------------------------------------------- quality

struct QualityArgs {
    std::string pings;
    std::string out;
    double max_accuracy = 100.0;
};

void run_quality(const QualityArgs& a) {
    Manifest man("quality");
    man.input("pings", a.pings);
    const auto ingest = load_pings(a.pings);
    std::vector<Trajectory> kept;
    std::size_t n_kept = 0;
    for (const auto& t : ingest.trajectories) {
        kept.push_back(filter_by_accuracy(t, a.max_accuracy));
        n_kept += kept.back().pings.size();
    }
    const auto acc_edges = default_accuracy_edges();
    const auto lri_edges = default_lri_edges();
    const auto raw = quality_histograms(ingest.trajectories, acc_edges, lri_edges);
    const auto filtered = quality_histograms(kept, acc_edges, lri_edges);
    auto emit = [&](const char* name, const Histogram& h) {
        const auto path = in_dir(a.out, name);
        write_file(path, [&](std::ostream& o) { write_histogram_csv(o, h); });
        man.output(path);
    };
    emit("accuracy.csv", raw.accuracy);
    emit("lri.csv", filtered.lri);
    emit("lri_raw.csv", raw.lri);
    man.params()["max_accuracy_m"] = a.max_accuracy;
    man.counts()["rows"] = ingest.rows;
    man.counts()["rejected"] = ingest.rejects;
    man.counts()["duplicates"] = ingest.duplicates;
    man.counts()["pings"] = ingest.pings();
    man.counts()["pings_kept"] = n_kept;
    man.write(in_dir(a.out, "manifest.json"));
}

// ----------------------------------------------------------------- detect

struct DetectArgs {
    std::string pings;
    std::string out;
    double max_accuracy = 100.0;
    std::optional<double> s, t, s_act, t_act, lri, v;
    std::optional<int> n;
};

StopParams resolve_stop_params(const Globals& g, const DetectArgs& a) {
    const auto base = preset(g.preset);
    if (!base) {
        std::string names;
        for (auto n : preset_names()) names += (names.empty() ? "" : ", ") + std::string(n);
        throw ValidationError("unknown preset '" + g.preset + "' (choose from " + names + ")");
    }
    StopParams p = *base;
    if (a.s) p.s = *a.s;
    if (a.t) p.t = *a.t;
    if (a.n) p.n = *a.n;
    if (a.s_act) p.s_act = *a.s_act;
    if (a.t_act) p.t_act = *a.t_act;
    if (a.lri) p.f = *a.lri;
    if (a.v) p.v = *a.v;
    if (p.n < 1) throw ValidationError("stop parameter 'n' must be at least 1");
    const auto failed = validate_params(p);
    if (!failed.empty()) {
        std::string msg = "stop parameters violate";
        for (auto c : failed) msg += " [" + std::string(describe(c)) + "]";
        throw ValidationError(msg);
    }
    return p;
}

void run_detect(const Globals& g, const DetectArgs& a) {
    const StopParams p = resolve_stop_params(g, a);
    Manifest man("detect");
    man.input("pings", a.pings);
    const auto ingest = load_pings(a.pings);
    const auto run = detect_all(ingest.trajectories, p, a.max_accuracy, g.threads);
    const auto roster = to_roster(run.trips);
    write_file(a.out, [&](std::ostream& o) { write_roster(o, roster); });
    man.output(a.out);
    man.params()["preset"] = g.preset;
    man.params()["stop"] = {{"s", p.s}, {"t", p.t}, {"n", p.n}, {"s_act", p.s_act},
                            {"t_act", p.t_act}, {"f", p.f}, {"v", p.v}};
    man.params()["max_accuracy_m"] = a.max_accuracy;
    man.counts()["rows"] = ingest.rows;
    man.counts()["rejected"] = ingest.rejects;
    man.counts()["duplicates"] = ingest.duplicates;
    man.counts()["pings_in"] = run.pings_in;
    man.counts()["pings_filtered"] = run.pings_in - run.pings_kept;
    man.counts()["clusters"] = run.counts.clusters;
    man.counts()["activities"] = run.counts.activities;
    man.counts()["overlapping_activity_pairs"] = run.counts.overlapping;
    man.counts()["trips"] = roster.size();
    man.write(cli::manifest_path_for(a.out));
}

// --------------------------------------------------------------- features

struct FeaturesArgs {
    std::string roster;
    std::string pings;
    std::vector<std::string> network;
    std::string out;
    double max_accuracy = 100.0;
};

void run_features(const Globals& g, const FeaturesArgs& a) {
    Manifest man("features");
    man.input("roster", a.roster);
    man.input("pings", a.pings);
    for (const auto& n : a.network) man.input("network", n);
    const auto roster = load_roster(a.roster);
    const auto ingest = load_pings(a.pings);
    std::vector<Trajectory> kept;
    for (const auto& t : ingest.trajectories) kept.push_back(filter_by_accuracy(t, a.max_accuracy));
    const Network net = load_network(a.network);
    const NetworkIndex index(net);
    const auto run = compute_features(roster, kept, index, g.threads);
    write_file(a.out, [&](std::ostream& o) { write_features(o, run.rows); });
    man.output(a.out);
    man.params()["max_accuracy_m"] = a.max_accuracy;
    man.params()["buffer_m"] = kNetworkBufferM;
    man.params()["feature_order_version"] = kFeatureOrderVersion;
    man.counts()["trips"] = roster.size();
    man.counts()["rows"] = run.rows.size();
    man.counts()["skipped"] = run.skipped.size();
    man.counts()["network_warnings"] = net.warnings;
    for (std::size_t i = 0; i < run.skipped.size() && i < 20; ++i) man.warning(run.skipped[i]);
    man.write(cli::manifest_path_for(a.out));
}

// ------------------------------------------------------------------ train

struct TrainArgs {
    std::string features;
    std::string out;
    double train_fraction = 0.7;
    int smote_k = 5;
    int cv_folds = 10;
    int knn_k = 5;
    std::optional<int> trees;
};

void run_train(const Globals& g, const TrainArgs& a) {
    const ModeSet set = mode_set_of(g);
    Manifest man("train");
    man.input("features", a.features);
    auto in = open_in(a.features);
    const auto rows = read_features(in);
    const auto ds = make_dataset(rows, set);
    ForestParams hp = ForestParams::preset(set);
    if (a.trees) hp.n_trees = *a.trees;

    const std::uint64_t split_seed = derive_seed(g.seed, 1);
    const std::uint64_t smote_seed = derive_seed(g.seed, 2);
    const std::uint64_t forest_seed = derive_seed(g.seed, 3);
    const std::uint64_t cv_seed = derive_seed(g.seed, 4);

    const auto split = split_train_test(ds, a.train_fraction, split_seed);
    const auto train = ds.subset(split.train);
    const auto test = ds.subset(split.test);
    const auto sm = smote_resample(train, a.smote_k, smote_seed);
    const auto model = train_random_forest(sm.data, hp, forest_seed, g.threads);

    std::vector<int> pred;
    std::vector<int> knn_pred;
    const KnnIndex knn(sm.data, Standardization::fit(sm.data.rows));
    for (const auto& r : test.rows) {
        pred.push_back(predict(model, r).label);
        knn_pred.push_back(knn.predict(r, a.knn_k));
    }
    const auto test_report = evaluate(pred, test.labels, ds.num_classes());
    const auto knn_report = evaluate(knn_pred, test.labels, ds.num_classes());

    ordered_json eval = {{"mode_set", std::string(mode_set_name(set))},
                         {"train_rows", train.size()},
                         {"train_rows_after_smote", sm.data.size()},
                         {"test_rows", test.size()},
                         {"random_forest_test", metrics_json(test_report, set)},
                         {"knn_test", metrics_json(knn_report, set)}};
    if (a.cv_folds > 0) {
        CvOptions opt;
        opt.folds = a.cv_folds;
        opt.smote_k = a.smote_k;
        opt.threads = g.threads;
        eval["random_forest_cv"] = metrics_json(cross_validate(ds, hp, cv_seed, opt), set);
    }
    for (const auto& w : sm.warnings) man.warning(w);

    const auto model_path = in_dir(a.out, "model.json");
    write_file(model_path, [&](std::ostream& o) { o << serialize_model(model); });
    man.output(model_path);
    const auto eval_path = in_dir(a.out, "evaluation.json");
    write_file(eval_path, [&](std::ostream& o) { o << eval.dump(2) << '\n'; });
    man.output(eval_path);
    const auto imp_path = in_dir(a.out, "importance.csv");
    write_file(imp_path, [&](std::ostream& o) {
        o << "feature,importance\n";
        for (const auto& [name, v] : feature_importance(model)) o << name << ',' << text::fmt_fixed(v, 6) << '\n';
    });
    man.output(imp_path);

    man.params()["mode_set"] = std::string(mode_set_name(set));
    man.params()["train_fraction"] = a.train_fraction;
    man.params()["smote_k"] = a.smote_k;
    man.params()["cv_folds"] = a.cv_folds;
    man.params()["knn_k"] = a.knn_k;
    man.params()["forest"] = {{"n_trees", hp.n_trees},
                              {"max_depth", hp.max_depth},
                              {"min_samples_split", hp.min_samples_split},
                              {"min_samples_leaf", hp.min_samples_leaf},
                              {"max_features", hp.max_features},
                              {"bootstrap", hp.bootstrap},
                              {"class_weight", hp.class_weight == ClassWeight::none ? "none" : "balanced_subsample"}};
    man.seeds()["base"] = g.seed;
    man.seeds()["split"] = split_seed;
    man.seeds()["smote"] = smote_seed;
    man.seeds()["forest"] = forest_seed;
    man.seeds()["cv"] = cv_seed;
    man.counts()["rows"] = ds.size();
    man.counts()["train"] = train.size();
    man.counts()["test"] = test.size();
    man.write(in_dir(a.out, "manifest.json"));
}

// ----------------------------------------------------------------- impute

struct ImputeArgs {
    std::string roster;
    std::string features;
    std::string model;
    std::string out;
    double air_speed_mph = 100.0;
    double air_duration_s = 3600.0;
    double air_distance_miles = 100.0;
};

AirRule air_rule(double mph, double seconds, double miles) {
    AirRule r;
    r.min_avg_speed_mps = mph * geo::kMpsPerMph;
    r.min_duration_s = seconds;
    r.min_distance_m = miles * geo::kMeterPerMile;
    r.validate();
    return r;
}

void run_impute(const ImputeArgs& a) {
    Manifest man("impute");
    man.input("roster", a.roster);
    man.input("features", a.features);
    man.input("model", a.model);
    const AirRule rule = air_rule(a.air_speed_mph, a.air_duration_s, a.air_distance_miles);
    const auto roster = load_roster(a.roster);
    auto fin = open_in(a.features);
    const auto features = read_features(fin);
    const auto model = deserialize_model(read_text(a.model));
    const auto run = impute_modes(roster, features, model, rule);
    write_file(a.out, [&](std::ostream& o) { write_roster(o, run.roster); });
    man.output(a.out);
    man.params()["mode_set"] = std::string(mode_set_name(model.mode_set));
    man.params()["air_rule"] = {{"min_avg_speed_mps", rule.min_avg_speed_mps},
                                {"min_duration_s", rule.min_duration_s},
                                {"min_distance_m", rule.min_distance_m}};
    man.counts()["trips"] = run.roster.size();
    man.counts()["air"] = run.air;
    man.counts()["imputed"] = run.imputed;
    man.counts()["missing_features"] = run.missing_features;
    man.write(cli::manifest_path_for(a.out));
}

// -------------------------------------------------------------- aggregate

struct AggregateArgs {
    std::string roster;
    std::string zones;
    std::string out;
    int jenks_k = 5;
    double heat_cell_deg = 0.05;
};

void run_aggregate(const Globals& g, const AggregateArgs& a) {
    const ModeSet set = mode_set_of(g);
    Manifest man("aggregate");
    man.input("roster", a.roster);
    auto roster = load_roster(a.roster);
    const AirRule rule;
    std::vector<std::size_t> air;
    for (std::size_t i = 0; i < roster.size(); ++i) {
        auto& r = roster[i];
        if (!r.is_air) r.is_air = is_air(r.distance_m, static_cast<double>(r.duration_s), rule);
        if (*r.is_air) air.push_back(i);
    }
    std::optional<std::vector<Zone>> zones;
    if (!a.zones.empty()) {
        man.input("zones", a.zones);
        zones = load_zones(a.zones);
    }
    const auto table = mode_share(roster, zones ? &*zones : nullptr, set);
    const DistributionConfig cfg = [&] {
        auto c = DistributionConfig::defaults();
        c.utc_offset_s = parse_utc_offset(g.utc_offset);
        return c;
    }();
    const auto panels = trip_distributions(roster, cfg);
    const auto heat = origin_heatmap(roster, air, a.heat_cell_deg);

    auto emit = [&](const char* name, const std::function<void(std::ostream&)>& body) {
        const auto path = in_dir(a.out, name);
        write_file(path, body);
        man.output(path);
    };
    emit("mode_share.csv", [&](std::ostream& o) { write_share_csv(o, table); });
    if (zones) emit("choropleth.csv", [&](std::ostream& o) { write_choropleth_csv(o, table, a.jenks_k); });
    emit("distributions.csv", [&](std::ostream& o) { write_distributions_csv(o, panels); });
    emit("air_heatmap.csv", [&](std::ostream& o) { write_heatmap_csv(o, heat); });

    std::size_t unlabeled = 0;
    for (const auto& r : roster) unlabeled += !r.is_air.value_or(false) && r.mode.empty();
    man.params()["mode_set"] = std::string(mode_set_name(set));
    man.params()["utc_offset_s"] = cfg.utc_offset_s;
    man.params()["jenks_classes"] = a.jenks_k;
    man.params()["heat_cell_deg"] = a.heat_cell_deg;
    man.counts()["trips"] = roster.size();
    man.counts()["air"] = air.size();
    man.counts()["ground_without_mode"] = unlabeled;
    man.counts()["share_rows"] = table.rows.size();
    man.write(in_dir(a.out, "manifest.json"));
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    std::string shares;
    std::string survey;
    std::string out;
};

void run_compare(const Globals& g, const CompareArgs& a) {
    const ModeSet set = mode_set_of(g);
    Manifest man("compare");
    man.input("shares", a.shares);
    man.input("survey", a.survey);
    auto sin = open_in(a.shares);
    auto vin = open_in(a.survey);
    const auto estimated = share_table_from_entries(read_share_entries(sin), set);
    const auto reference = read_share_entries(vin);
    const auto rows = compare_shares(estimated, reference);
    write_file(a.out, [&](std::ostream& o) { write_correlation_csv(o, rows); });
    man.output(a.out);
    man.params()["mode_set"] = std::string(mode_set_name(set));
    man.params()["pairing"] = "zones present in both tables; missing zone-mode pairs count as 0";
    man.counts()["zones_compared"] = rows.empty() ? 0 : rows.front().n / modes_of(set).size();
    man.write(cli::manifest_path_for(a.out));
}

// --------------------------------------------------------- evaluate-diary

struct DiaryArgs {
    std::string roster;
    std::string diary;
    std::string out;
    double tol_s = 300.0;
    double tol_m = 200.0;
};

void run_evaluate_diary(const DiaryArgs& a) {
    Manifest man("evaluate-diary");
    man.input("roster", a.roster);
    man.input("diary", a.diary);
    if (!(a.tol_s >= 0.0) || !(a.tol_m >= 0.0)) throw ValidationError("tolerances must be non-negative");
    const auto roster = load_roster(a.roster);
    auto din = open_in(a.diary);
    const auto diary = read_diary(din);
    const auto trips = trips_from_roster(roster, {});
    const auto match = match_diary(trips, diary, {a.tol_s, a.tol_m});
    const auto& r = match.report;
    ordered_json j = {{"reported", r.reported},
                      {"identified", r.identified},
                      {"matched", r.matched},
                      {"underreported", r.underreported()},
                      {"hit_ratio", r.hit_ratio ? ordered_json(*r.hit_ratio) : ordered_json(nullptr)},
                      {"tolerance_s", a.tol_s},
                      {"tolerance_m", a.tol_m}};
    write_file(a.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    man.output(a.out);
    man.params()["tolerance_s"] = a.tol_s;
    man.params()["tolerance_m"] = a.tol_m;
    man.counts()["reported"] = r.reported;
    man.counts()["matched"] = r.matched;
    man.write(cli::manifest_path_for(a.out));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trip detection and travel-mode imputation from mobile device location data"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", cli::kToolVersion);

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Base random seed");
    auto* offset_opt = app.add_option("--utc-offset", g.utc_offset, "Local time offset, hours or +HH:MM");
    app.add_option("--preset", g.preset, "Stop-detection preset (lri1, lri2, lri5, lri15, lbs-relaxed)");
    app.add_option("--mode-set", g.mode_set, "four or five");
    app.add_option("--threads", g.threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic corpus");
    synth->add_option("--out", sa.out, "Output directory")->required();
    synth->add_option("--config", sa.config, "Corpus config JSON");
    synth->add_option("--devices", sa.devices, "Number of devices");
    synth->add_option("--days", sa.days, "Days per device");
    synth->add_option("--lri-fixed", sa.lri_fixed, "Fixed recording interval in seconds");
    synth->add_flag("--no-noise", sa.no_noise, "Emit exact positions");

    QualityArgs qa;
    auto* quality = app.add_subcommand("quality", "Accuracy and recording-interval histograms");
    quality->add_option("--pings", qa.pings)->required();
    quality->add_option("--out", qa.out, "Output directory")->required();
    quality->add_option("--max-accuracy", qa.max_accuracy, "Accuracy filter for the LRI table, m");

    DetectArgs da;
    auto* detect = app.add_subcommand("detect", "Detect trips from pings");
    detect->add_option("--pings", da.pings)->required();
    detect->add_option("--out", da.out, "Roster CSV")->required();
    detect->add_option("--max-accuracy", da.max_accuracy, "Drop pings with a larger accuracy radius, m");
    detect->add_option("--s", da.s, "Spatial radius, m");
    detect->add_option("--t", da.t, "Temporal radius, s");
    detect->add_option("--n", da.n, "Minimum neighbors");
    detect->add_option("--s-act", da.s_act, "Activity merge distance, m");
    detect->add_option("--t-act", da.t_act, "Minimum activity dwell, s");
    detect->add_option("--lri", da.lri, "Nominal recording interval, s");
    detect->add_option("--walk-speed", da.v, "Walking speed, m/s");

    FeaturesArgs fa;
    auto* features = app.add_subcommand("features", "Compute trip features");
    features->add_option("--roster", fa.roster)->required();
    features->add_option("--pings", fa.pings)->required();
    features->add_option("--network", fa.network, "Network NDJSON (repeatable)")->required();
    features->add_option("--out", fa.out, "Features CSV")->required();
    features->add_option("--max-accuracy", fa.max_accuracy);

    TrainArgs ta;
    auto* train = app.add_subcommand("train", "Train and evaluate the mode classifier");
    train->add_option("--features", ta.features)->required();
    train->add_option("--out", ta.out, "Output directory")->required();
    train->add_option("--train-fraction", ta.train_fraction);
    train->add_option("--smote-k", ta.smote_k);
    train->add_option("--cv-folds", ta.cv_folds, "0 skips cross-validation");
    train->add_option("--knn-k", ta.knn_k);
    train->add_option("--trees", ta.trees, "Override the preset tree count");

    ImputeArgs ia;
    auto* impute = app.add_subcommand("impute", "Flag air trips and impute modes");
    impute->add_option("--roster", ia.roster)->required();
    impute->add_option("--features", ia.features)->required();
    impute->add_option("--model", ia.model)->required();
    impute->add_option("--out", ia.out, "Imputed roster CSV")->required();
    impute->add_option("--air-speed-mph", ia.air_speed_mph);
    impute->add_option("--air-duration-s", ia.air_duration_s);
    impute->add_option("--air-distance-miles", ia.air_distance_miles);

    AggregateArgs aa;
    auto* aggregate = app.add_subcommand("aggregate", "Mode shares and trip distributions");
    aggregate->add_option("--roster", aa.roster)->required();
    aggregate->add_option("--zones", aa.zones, "Zones NDJSON");
    aggregate->add_option("--out", aa.out, "Output directory")->required();
    aggregate->add_option("--jenks-k", aa.jenks_k, "Natural-breaks classes for the choropleth table");
    aggregate->add_option("--heat-cell-deg", aa.heat_cell_deg);

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "Correlate mode shares with a reference table");
    compare->add_option("--shares", ca.shares)->required();
    compare->add_option("--survey", ca.survey)->required();
    compare->add_option("--out", ca.out, "Correlation CSV")->required();

    DiaryArgs ea;
    auto* evaluate = app.add_subcommand("evaluate-diary", "Hit ratio of detected trips against a diary");
    evaluate->add_option("--roster", ea.roster)->required();
    evaluate->add_option("--diary", ea.diary)->required();
    evaluate->add_option("--out", ea.out, "Report JSON")->required();
    evaluate->add_option("--tol-s", ea.tol_s);
    evaluate->add_option("--tol-m", ea.tol_m);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth) run_synth(g, sa, seed_opt->count() > 0, offset_opt->count() > 0);
        else if (*quality) run_quality(qa);
        else if (*detect) run_detect(g, da);
        else if (*features) run_features(g, fa);
        else if (*train) run_train(g, ta);
        else if (*impute) run_impute(ia);
        else if (*aggregate) run_aggregate(g, aa);
        else if (*compare) run_compare(g, ca);
        else if (*evaluate) run_evaluate_diary(ea);
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
