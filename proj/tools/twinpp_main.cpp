// twinpp: simulate synthetic event corpora, prepare windowed samples, train
// the twin-RNN model (and the two classical baselines), evaluate, and
// predict the next event for an entity.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "twinpp/baselines/hawkes_mle.hpp"
#include "twinpp/baselines/logistic.hpp"
#include "twinpp/data/event_log.hpp"
#include "twinpp/data/samples.hpp"
#include "twinpp/metrics/metrics.hpp"
#include "twinpp/model/checkpoint.hpp"
#include "twinpp/numcore/rng.hpp"
#include "twinpp/ppsim/synthetic.hpp"
#include "twinpp/trainer/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twinpp;

namespace {

// All command outputs go through here: write to a temp sibling, rename on
// success, so failures never leave partial files behind.
void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    in >> doc;
    return doc;
}

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 42;
    int threads = 1;
    json config;  // parsed --config document, or empty object

    bool seed_given = false;
    bool threads_given = false;

    void finalize() {
        if (!config_path.empty()) config = load_json_file(config_path);
        if (!seed_given && config.contains("seed")) seed = config["seed"].get<std::uint64_t>();
        if (!threads_given) {
            if (config.contains("threads")) {
                threads = config["threads"].get<int>();
            } else if (const char* env = std::getenv("TWINPP_THREADS")) {
                threads = std::max(1, std::atoi(env));
            }
        }
    }
};

// Pull a section of the run config; missing sections read as {}.
json section(const json& cfg, const std::string& key) {
    return cfg.contains(key) ? cfg.at(key) : json::object();
}

ppsim::MultiHawkes generator_from_json(const json& doc) {
    ppsim::MultiHawkes g;
    g.mu = doc.at("mu").get<std::vector<double>>();
    g.A = doc.at("A").get<std::vector<std::vector<double>>>();
    g.beta = doc.at("beta").get<double>();
    g.validate();
    return g;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOpts& g, const std::string& out_dir, int entities_flag,
                 double horizon_flag) {
    const json sim = section(g.config, "simulate");
    ppsim::SyntheticSpec spec = ppsim::SyntheticSpec::default_spec();
    if (sim.contains("taxonomy")) spec.taxonomy = Taxonomy::from_json(sim.at("taxonomy"));
    if (sim.contains("generator")) spec.generator = generator_from_json(sim.at("generator"));
    spec.n_entities = entities_flag > 0 ? entities_flag : sim.value("entities", spec.n_entities);
    spec.horizon_days =
        horizon_flag > 0 ? horizon_flag : sim.value("horizon_days", spec.horizon_days);
    spec.profile_effect = sim.value("profile_effect", spec.profile_effect);

    if (spec.generator.branching_bound() >= 1.0)
        std::cerr << "warning: generator branching bound >= 1, process may be non-stationary\n";

    const ppsim::SyntheticDataset ds = ppsim::make_synthetic_dataset(spec, g.seed, g.threads);

    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "events.jsonl", data::to_jsonl(ds.events, ds.taxonomy));
    write_file_atomic(fs::path(out_dir) / "profiles.csv", data::to_csv(ds.profiles));
    write_file_atomic(fs::path(out_dir) / "taxonomy.json", ds.taxonomy.to_json().dump(2) + "\n");
    write_file_atomic(fs::path(out_dir) / "manifest.json", ds.manifest.dump(2) + "\n");
    std::cout << "simulated " << ds.events.size() << " events for " << spec.n_entities
              << " entities over " << spec.horizon_days << " days -> " << out_dir << "\n";
    return 0;
}

// ----------------------------------------------------------------- prepare

int cmd_prepare(const GlobalOpts& g, const std::string& events_path,
                const std::string& profiles_path, const std::string& taxonomy_path,
                const std::string& out_dir, double test_fraction) {
    const json wcfg = section(g.config, "window");
    const data::WindowConfig wc = data::WindowConfig::from_json(wcfg);

    const Taxonomy taxonomy = Taxonomy::from_json(load_json_file(taxonomy_path));
    std::ifstream events_in(events_path);
    if (!events_in) throw std::runtime_error("cannot open " + events_path);
    const data::ParsedLog log = data::parse_event_log(events_in, taxonomy);
    if (log.duplicates_removed > 0)
        std::cerr << "warning: removed " << log.duplicates_removed << " duplicate event lines\n";
    std::ifstream profiles_in(profiles_path);
    if (!profiles_in) throw std::runtime_error("cannot open " + profiles_path);
    const data::ParsedProfiles profiles = data::parse_profiles(profiles_in);

    const auto ids = data::entity_ids_of(log.records);
    const auto [train_ids, test_ids] = data::split_entities(ids, test_fraction, g.seed);

    const auto train_events = data::filter_by_entities(log.records, train_ids);
    const auto test_events = data::filter_by_entities(log.records, test_ids);

    data::ParsedProfiles train_profiles, test_profiles;
    train_profiles.feature_names = profiles.feature_names;
    test_profiles.feature_names = profiles.feature_names;
    for (const auto& r : profiles.records) {
        const bool in_train =
            std::binary_search(train_ids.begin(), train_ids.end(), r.entity_id);
        (in_train ? train_profiles : test_profiles).records.push_back(r);
    }

    const data::SampleSet train_set = data::build_samples(train_events, train_profiles, wc, taxonomy);
    const data::SampleSet test_set =
        data::build_samples(test_events, test_profiles, wc, taxonomy, train_set.norm);

    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "samples_train.jsonl", train_set.to_jsonl());
    write_file_atomic(fs::path(out_dir) / "samples_test.jsonl", test_set.to_jsonl());
    json split{{"format_version", num::kFormatVersion},
               {"test_fraction", test_fraction},
               {"train_entities", train_ids},
               {"test_entities", test_ids}};
    write_file_atomic(fs::path(out_dir) / "split.json", split.dump(2) + "\n");
    std::cout << "prepared " << train_set.samples.size() << " train and "
              << test_set.samples.size() << " test samples -> " << out_dir << "\n";
    return 0;
}

// ------------------------------------------------------------------- train

// Entity-level validation split from the training sample file.
std::pair<std::vector<model::Sample>, std::vector<model::Sample>> split_for_validation(
    const std::vector<model::Sample>& samples, double val_fraction, std::uint64_t seed) {
    std::vector<std::string> ids;
    for (const auto& s : samples)
        if (ids.empty() || ids.back() != s.entity_id) ids.push_back(s.entity_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const auto [fit_ids, val_ids] = data::split_entities(ids, val_fraction, num::Rng::mix(seed, 77));
    std::vector<model::Sample> fit, val;
    for (const auto& s : samples) {
        const bool in_val = std::binary_search(val_ids.begin(), val_ids.end(), s.entity_id);
        (in_val ? val : fit).push_back(s);
    }
    return {fit, val};
}

int cmd_train(const GlobalOpts& g, const std::string& samples_path, const std::string& events_path,
              const std::string& out_dir, const std::string& variant_str,
              const std::string& head_str, const std::string& baseline, double val_fraction,
              bool variant_explicit, const CLI::App* sub) {
    if (baseline != "none" && variant_explicit)
        throw std::runtime_error("config conflict: --variant and --baseline are mutually exclusive");

    const json tcfg_json = section(g.config, "train");
    train::TrainConfig tcfg = train::TrainConfig::from_json(tcfg_json);
    tcfg.rng_seed = g.seed;
    tcfg.threads = g.threads;
    if (sub->count("--epochs")) tcfg.max_epochs = sub->get_option("--epochs")->as<int>();
    if (sub->count("--batch-size")) tcfg.batch_size = sub->get_option("--batch-size")->as<int>();
    if (sub->count("--learning-rate"))
        tcfg.learning_rate = sub->get_option("--learning-rate")->as<double>();
    if (sub->count("--patience")) tcfg.patience = sub->get_option("--patience")->as<int>();
    if (sub->count("--loss-mode"))
        tcfg.loss_mode =
            train::loss_mode_from_string(sub->get_option("--loss-mode")->as<std::string>());
    tcfg.validate();

    fs::create_directories(out_dir);

    if (baseline == "hawkes") {
        if (events_path.empty())
            throw std::runtime_error("baseline=hawkes trains on event sequences: pass --events");
        const json bcfg = section(g.config, "baseline");
        const double l1 = bcfg.value("l1_weight", 0.1);
        const int max_iters = bcfg.value("max_iters", 400);

        // Taxonomy travels with the sample file so reports share ids.
        std::ifstream samples_in(samples_path);
        if (!samples_in) throw std::runtime_error("cannot open " + samples_path);
        const data::SampleSet sample_set = data::SampleSet::from_jsonl(samples_in);
        const Taxonomy taxonomy = sample_set.taxonomy;

        std::ifstream events_in(events_path);
        if (!events_in) throw std::runtime_error("cannot open " + events_path);
        const data::ParsedLog log = data::parse_event_log(events_in, taxonomy);

        // One sequence per entity present in the training sample file. All
        // entities share one observation window, so the common horizon is
        // the latest timestamp anywhere in the log.
        double horizon = 0.0;
        for (const auto& e : log.records) horizon = std::max(horizon, e.timestamp);
        std::vector<std::string> ids;
        for (const auto& s : sample_set.samples) ids.push_back(s.entity_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::vector<ppsim::EventSequence> seqs;
        for (const auto& id : ids) {
            ppsim::EventSequence seq;
            seq.horizon = horizon;
            for (const auto& e : log.records) {
                if (e.entity_id != id) continue;
                seq.times.push_back(e.timestamp);
                seq.marks.push_back(e.sub_type);
            }
            if (!seq.times.empty()) seqs.push_back(std::move(seq));
        }
        // Held-out tail of sequences picks the kernel decay.
        const std::size_t n_val = std::max<std::size_t>(1, seqs.size() / 5);
        std::vector<ppsim::EventSequence> fit_seqs(seqs.begin(),
                                                   seqs.end() - static_cast<std::ptrdiff_t>(n_val));
        std::vector<ppsim::EventSequence> val_seqs(seqs.end() - static_cast<std::ptrdiff_t>(n_val),
                                                   seqs.end());
        if (fit_seqs.empty()) fit_seqs = seqs;

        const auto fit = baselines::fit_hawkes_select_beta(fit_seqs, val_seqs, taxonomy.k_sub(),
                                                           l1, max_iters);
        json doc = baselines::hawkes_fit_to_json(fit);
        doc["taxonomy"] = taxonomy.to_json();
        write_file_atomic(fs::path(out_dir) / "hawkes_model.json", doc.dump(2) + "\n");
        std::cout << "hawkes baseline fitted: beta=" << fit.params.beta
                  << " nll=" << fit.nll_trace.back() << " iters=" << fit.iterations << " -> "
                  << out_dir << "\n";
        return 0;
    }

    std::ifstream samples_in(samples_path);
    if (!samples_in) throw std::runtime_error("cannot open " + samples_path);
    const data::SampleSet sample_set = data::SampleSet::from_jsonl(samples_in);
    if (sample_set.samples.empty()) throw std::runtime_error("training sample file is empty");

    if (baseline == "logistic") {
        const json bcfg = section(g.config, "baseline");
        const double l2 = bcfg.value("l2_weight", 1e-4);
        const auto report =
            baselines::fit_logistic(sample_set.samples, l2, sample_set.taxonomy.k_sub());
        if (report.single_class_warning)
            std::cerr << "warning: training data contains a single class\n";
        json doc = report.models.to_json();
        doc["taxonomy"] = sample_set.taxonomy.to_json();
        write_file_atomic(fs::path(out_dir) / "logistic_model.json", doc.dump(2) + "\n");
        std::cout << "logistic baseline fitted in " << report.classifier_iterations
                  << " iterations -> " << out_dir << "\n";
        return 0;
    }
    if (baseline != "none") throw std::runtime_error("unknown baseline: " + baseline);

    model::ModelConfig mcfg = model::ModelConfig::from_json(section(g.config, "model"));
    mcfg.variant = model::variant_from_string(variant_str);
    mcfg.head_mode = model::head_mode_from_string(head_str);
    mcfg.k_main = sample_set.taxonomy.k_main();
    mcfg.k_sub = sample_set.taxonomy.k_sub();
    mcfg.ts_feature_dim = sample_set.ts_feature_dim;
    mcfg.validate();

    const auto [fit_samples, val_samples] =
        split_for_validation(sample_set.samples, val_fraction, g.seed);
    if (fit_samples.empty() || val_samples.empty())
        throw std::runtime_error("validation split left an empty side; adjust --val-fraction");

    model::TwinRnn net(mcfg);
    const train::TrainResult result = train::train(net, fit_samples, val_samples,
                                                   sample_set.taxonomy, tcfg);

    json ckpt = model::to_checkpoint(net, sample_set.taxonomy);
    ckpt["window"] = sample_set.window.to_json();
    ckpt["static_feature_names"] = sample_set.static_feature_names;
    ckpt["static_mean"] = sample_set.norm.mean;
    ckpt["static_stdev"] = sample_set.norm.stdev;
    ckpt["train_config"] = tcfg.to_json();
    ckpt["best_epoch"] = result.best_epoch;
    ckpt["best_val_loss"] = result.best_val_loss;
    write_file_atomic(fs::path(out_dir) / "checkpoint.json", ckpt.dump() + "\n");

    std::ostringstream curve;
    curve << "epoch,train_loss,val_loss\n";
    curve.precision(17);
    for (const auto& e : result.curve)
        curve << e.epoch << "," << e.train_loss << "," << e.val_loss << "\n";
    write_file_atomic(fs::path(out_dir) / "curve.csv", curve.str());

    std::cout << "trained " << variant_str << "/" << head_str << ": best val loss "
              << result.best_val_loss << " at epoch " << result.best_epoch << " -> " << out_dir
              << "\n";
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct PredictionSet {
    std::vector<int> main_truth, main_pred, sub_truth, sub_pred;
    std::vector<double> gap_truth, gap_pred;
};

void write_reports(const PredictionSet& p, const Taxonomy& taxonomy, const std::string& kind,
                   double threshold_days, const std::string& out_dir) {
    const metrics::MetricsReport main_rep =
        metrics::evaluate(p.main_truth, p.main_pred, p.gap_pred, p.gap_truth, taxonomy.k_main(),
                          taxonomy.main_names, threshold_days);
    const metrics::MetricsReport sub_rep =
        metrics::evaluate(p.sub_truth, p.sub_pred, p.gap_pred, p.gap_truth, taxonomy.k_sub(),
                          taxonomy.sub_names, threshold_days);

    json report{{"format_version", num::kFormatVersion},
                {"model_kind", kind},
                {"threshold_days", threshold_days},
                {"main", main_rep.to_json()},
                {"sub", sub_rep.to_json()}};
    write_file_atomic(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
    write_file_atomic(fs::path(out_dir) / "report_main.csv", main_rep.to_csv());
    write_file_atomic(fs::path(out_dir) / "report_sub.csv", sub_rep.to_csv());
    write_file_atomic(fs::path(out_dir) / "confusion_main.csv", main_rep.cm.to_csv());
    write_file_atomic(fs::path(out_dir) / "confusion_sub.csv", sub_rep.cm.to_csv());

    std::cout << "evaluated " << p.sub_truth.size() << " samples (" << kind << "): macro F1 main "
              << main_rep.prf.macro_f1 << ", sub " << sub_rep.prf.macro_f1 << ", MAE "
              << sub_rep.mae_days << " days -> " << out_dir << "\n";
}

int cmd_evaluate(const GlobalOpts& g, const std::string& model_path,
                 const std::string& samples_path, const std::string& events_path,
                 const std::string& out_dir, double threshold_days) {
    std::ifstream samples_in(samples_path);
    if (!samples_in) throw std::runtime_error("cannot open " + samples_path);
    const data::SampleSet sample_set = data::SampleSet::from_jsonl(samples_in);
    const json doc = load_json_file(model_path);
    fs::create_directories(out_dir);

    PredictionSet p;
    std::string kind;
    if (doc.contains("model_config")) {
        kind = "twin-rnn";
        const model::LoadedModel loaded = model::from_checkpoint(doc);
        for (const auto& s : sample_set.samples) {
            const auto pred = loaded.model->predict_next(s);
            p.main_truth.push_back(s.target_main);
            p.sub_truth.push_back(s.target_sub);
            p.main_pred.push_back(pred.main_type);
            p.sub_pred.push_back(pred.sub_type);
            p.gap_truth.push_back(s.target_gap);
            p.gap_pred.push_back(pred.gap_days);
        }
        write_reports(p, loaded.taxonomy, kind, threshold_days, out_dir);
        return 0;
    }
    if (doc.contains("w_gap")) {
        kind = "logistic";
        const auto models = baselines::LogisticModels::from_json(doc);
        const Taxonomy taxonomy = Taxonomy::from_json(doc.at("taxonomy"));
        for (const auto& s : sample_set.samples) {
            const auto pred = baselines::predict_logistic(models, s);
            p.main_truth.push_back(s.target_main);
            p.sub_truth.push_back(s.target_sub);
            p.sub_pred.push_back(pred.sub_type);
            p.main_pred.push_back(taxonomy.sub_parent[static_cast<std::size_t>(pred.sub_type)]);
            p.gap_truth.push_back(s.target_gap);
            p.gap_pred.push_back(pred.gap_days);
        }
        write_reports(p, taxonomy, kind, threshold_days, out_dir);
        return 0;
    }
    if (doc.contains("generator")) {
        kind = "hawkes";
        if (events_path.empty())
            throw std::runtime_error("hawkes evaluation needs --events for entity histories");
        const auto fit = baselines::hawkes_fit_from_json(doc);
        const Taxonomy taxonomy = Taxonomy::from_json(doc.at("taxonomy"));
        std::ifstream events_in(events_path);
        if (!events_in) throw std::runtime_error("cannot open " + events_path);
        const data::ParsedLog log = data::parse_event_log(events_in, taxonomy);
        const json bcfg = section(g.config, "baseline");
        const int n_rollouts = bcfg.value("n_rollouts", 100);

        std::map<std::string, std::vector<const data::EventLogRecord*>> per_entity;
        for (const auto& e : log.records) per_entity[e.entity_id].push_back(&e);

        std::size_t idx = 0;
        for (const auto& s : sample_set.samples) {
            ppsim::EventSequence hist;
            const auto it = per_entity.find(s.entity_id);
            if (it != per_entity.end()) {
                for (const auto* e : it->second) {
                    if (e->timestamp >= s.anchor_time) break;  // records sorted in time
                    hist.times.push_back(e->timestamp);
                    hist.marks.push_back(e->sub_type);
                }
            }
            hist.horizon = hist.times.empty() ? 0.0 : hist.times.back();
            const auto pred = baselines::hawkes_predict_next(
                fit.params, hist, n_rollouts, num::Rng::mix(g.seed, idx++));
            p.main_truth.push_back(s.target_main);
            p.sub_truth.push_back(s.target_sub);
            p.sub_pred.push_back(pred.type);
            p.main_pred.push_back(taxonomy.sub_parent[static_cast<std::size_t>(pred.type)]);
            p.gap_truth.push_back(s.target_gap);
            p.gap_pred.push_back(pred.gap_days);
        }
        write_reports(p, taxonomy, kind, threshold_days, out_dir);
        return 0;
    }
    throw std::runtime_error("unrecognized model file: " + model_path);
}

// ----------------------------------------------------------------- predict

int cmd_predict(const std::string& model_path, const std::string& events_path,
                const std::string& profiles_path, const std::string& entity, double at_time) {
    const json doc = load_json_file(model_path);
    if (!doc.contains("model_config"))
        throw std::runtime_error("predict requires a twin-rnn checkpoint");
    const model::LoadedModel loaded = model::from_checkpoint(doc);
    const data::WindowConfig wc = data::WindowConfig::from_json(doc.at("window"));
    data::NormStats norm;
    norm.mean = doc.at("static_mean").get<std::vector<double>>();
    norm.stdev = doc.at("static_stdev").get<std::vector<double>>();

    std::ifstream events_in(events_path);
    if (!events_in) throw std::runtime_error("cannot open " + events_path);
    const data::ParsedLog log = data::parse_event_log(events_in, loaded.taxonomy);
    std::ifstream profiles_in(profiles_path);
    if (!profiles_in) throw std::runtime_error("cannot open " + profiles_path);
    const data::ParsedProfiles profiles = data::parse_profiles(profiles_in);

    const model::Sample query = data::build_inference_sample(
        log.records, profiles, wc, loaded.taxonomy, norm, entity, at_time);
    const auto pred = loaded.model->predict_next(query);

    double last_event_time = 0.0;
    for (const auto& e : log.records)
        if (e.entity_id == entity && e.timestamp <= at_time)
            last_event_time = std::max(last_event_time, e.timestamp);

    json out{{"entity_id", entity},
             {"at_time", at_time},
             {"main_type", loaded.taxonomy.main_names[static_cast<std::size_t>(pred.main_type)]},
             {"sub_type", loaded.taxonomy.sub_names[static_cast<std::size_t>(pred.sub_type)]},
             {"gap_days", pred.gap_days},
             {"last_event_time", last_event_time},
             {"predicted_time", last_event_time + pred.gap_days}};
    std::cout << out.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twin-RNN point-process toolkit"};
    app.fallthrough();  // global flags may follow the subcommand
    app.set_version_flag("--version", std::string("twinpp format version ") +
                                          std::to_string(num::kFormatVersion));

    GlobalOpts g;
    app.add_option("--config", g.config_path, "run configuration JSON; flags override its values");
    auto* seed_opt = app.add_option("--seed", g.seed, "master RNG seed");
    auto* threads_opt =
        app.add_option("--threads", g.threads, "worker threads (default: TWINPP_THREADS or 1)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a labeled synthetic corpus");
    std::string sim_out = "data";
    int sim_entities = 0;
    double sim_horizon = 0.0;
    sim->add_option("--out-dir", sim_out, "output directory");
    sim->add_option("--entities", sim_entities, "number of entities");
    sim->add_option("--horizon", sim_horizon, "horizon in days");

    // prepare
    auto* prep = app.add_subcommand("prepare", "window events into model samples");
    std::string prep_events, prep_profiles, prep_taxonomy, prep_out = "prepared";
    double prep_test_fraction = 0.3;
    prep->add_option("--events", prep_events, "events JSONL")->required();
    prep->add_option("--profiles", prep_profiles, "profiles CSV")->required();
    prep->add_option("--taxonomy", prep_taxonomy, "taxonomy JSON")->required();
    prep->add_option("--out-dir", prep_out, "output directory");
    prep->add_option("--test-fraction", prep_test_fraction, "entity fraction held out for testing");

    // train
    auto* tr = app.add_subcommand("train", "train a model variant or baseline");
    std::string tr_samples, tr_events, tr_out = "run";
    std::string tr_variant = "intensity", tr_head = "hierarchical", tr_baseline = "none";
    double tr_val_fraction = 0.15;
    tr->add_option("--samples", tr_samples, "training sample file")->required();
    tr->add_option("--events", tr_events, "events JSONL (hawkes baseline only)");
    tr->add_option("--out-dir", tr_out, "output directory");
    auto* tr_variant_opt =
        tr->add_option("--variant", tr_variant, "intensity | time-series | event");
    tr->add_option("--head", tr_head, "flat | hierarchical");
    tr->add_option("--baseline", tr_baseline, "none | hawkes | logistic");
    tr->add_option("--val-fraction", tr_val_fraction, "entity fraction used for early stopping");
    tr->add_option("--epochs", "maximum training epochs");
    tr->add_option("--batch-size", "mini-batch size");
    tr->add_option("--learning-rate", "RMSprop learning rate");
    tr->add_option("--patience", "early-stopping patience");
    tr->add_option("--loss-mode", "joint | main-only | sub-only");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "score a trained model on prepared samples");
    std::string ev_model, ev_samples, ev_events, ev_out = "eval";
    double ev_threshold = 3.0;
    ev->add_option("--model", ev_model, "model file (checkpoint or baseline)")->required();
    ev->add_option("--samples", ev_samples, "evaluation sample file")->required();
    ev->add_option("--events", ev_events, "events JSONL (hawkes baseline only)");
    ev->add_option("--out-dir", ev_out, "output directory");
    ev->add_option("--threshold-days", ev_threshold, "time-accuracy threshold for F1+");

    // predict
    auto* pr = app.add_subcommand("predict", "predict the next event for one entity");
    std::string pr_model, pr_events, pr_profiles, pr_entity;
    double pr_at_time = 0.0;
    pr->add_option("--model", pr_model, "twin-rnn checkpoint")->required();
    pr->add_option("--events", pr_events, "events JSONL")->required();
    pr->add_option("--profiles", pr_profiles, "profiles CSV")->required();
    pr->add_option("--entity", pr_entity, "entity id")->required();
    pr->add_option("--at-time", pr_at_time, "prediction time in days")->required();

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
        g.seed_given = seed_opt->count() > 0;
        g.threads_given = threads_opt->count() > 0;
        g.finalize();

        if (sim->parsed()) return cmd_simulate(g, sim_out, sim_entities, sim_horizon);
        if (prep->parsed())
            return cmd_prepare(g, prep_events, prep_profiles, prep_taxonomy, prep_out,
                               prep_test_fraction);
        if (tr->parsed())
            return cmd_train(g, tr_samples, tr_events, tr_out, tr_variant, tr_head, tr_baseline,
                             tr_val_fraction, tr_variant_opt->count() > 0, tr);
        if (ev->parsed())
            return cmd_evaluate(g, ev_model, ev_samples, ev_events, ev_out, ev_threshold);
        if (pr->parsed())
            return cmd_predict(pr_model, pr_events, pr_profiles, pr_entity, pr_at_time);
        std::cout << app.help() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
