// SPDX-License-Identifier: Apache-2.0
//
// cranopt - learned cooperative beamforming and fronthaul quantization for C-RAN
// Copyright (C) 2026 The cranopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cli.hpp"

#include "cran/parallel.hpp"
#include "cran/random.hpp"
#include "cran/trainer.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#ifndef CRAN_GIT_DESCRIBE
#define CRAN_GIT_DESCRIBE "unknown"
#endif

namespace cran::cli
{

// ---- configuration -----------------------------------------------------------------

namespace
{

std::size_t parse_size(const std::string &key, const std::string &v)
{
    std::size_t pos = 0;
    unsigned long long x = 0;
    try
    {
        if (!v.empty() && v[0] == '-')
            throw std::invalid_argument("negative");
        x = std::stoull(v, &pos);
    }
    catch (const std::exception &)
    {
        throw ConfigError("invalid value for " + key + ": '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("invalid value for " + key + ": '" + v + "'");
    return static_cast<std::size_t>(x);
}

double parse_double(const std::string &key, const std::string &v)
{
    std::size_t pos = 0;
    double x = 0.0;
    try
    {
        x = std::stod(v, &pos);
    }
    catch (const std::exception &)
    {
        throw ConfigError("invalid value for " + key + ": '" + v + "'");
    }
    if (pos != v.size() || !std::isfinite(x))
        throw ConfigError("invalid value for " + key + ": '" + v + "'");
    return x;
}

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

const std::vector<std::string> &config_keys()
{
    static const std::vector<std::string> keys{
        "m",           "k",           "variant",     "depth",       "width",         "batch",
        "max_iter",    "val_interval", "patience",   "lr",          "lr_decay",      "lr_patience",
        "stats_samples", "n_val",     "n_test",      "seed",        "threads",       "ls_restarts",
        "ls_max_iter", "ls_tol",      "ls_step",     "d0",          "ring_radius",   "eta",
        "scatterers",  "wavelength",  "cell_radius", "p_min",       "p_max",         "c_min",
        "c_max"};
    return keys;
}

void RunConfig::set(const std::string &key, const std::string &value)
{
    const std::string v = trim(value);
    if (key == "m")
        m = parse_size(key, v);
    else if (key == "k")
        k = parse_size(key, v);
    else if (key == "variant")
    {
        (void)variant_from_string(v);
        variant = v;
    }
    else if (key == "depth")
        depth = parse_size(key, v);
    else if (key == "width")
        width = parse_size(key, v);
    else if (key == "batch")
        batch = parse_size(key, v);
    else if (key == "max_iter")
        max_iter = parse_size(key, v);
    else if (key == "val_interval")
        val_interval = parse_size(key, v);
    else if (key == "patience")
        patience = parse_size(key, v);
    else if (key == "lr")
        lr = parse_double(key, v);
    else if (key == "lr_decay")
        lr_decay = parse_double(key, v);
    else if (key == "lr_patience")
        lr_patience = parse_size(key, v);
    else if (key == "stats_samples")
        stats_samples = parse_size(key, v);
    else if (key == "n_val")
        n_val = parse_size(key, v);
    else if (key == "n_test")
        n_test = parse_size(key, v);
    else if (key == "seed")
        seed = parse_size(key, v);
    else if (key == "threads")
        threads = parse_size(key, v);
    else if (key == "ls_restarts")
        ls_restarts = parse_size(key, v);
    else if (key == "ls_max_iter")
        ls_max_iter = parse_size(key, v);
    else if (key == "ls_tol")
        ls_tol = parse_double(key, v);
    else if (key == "ls_step")
        ls_step = parse_double(key, v);
    else if (key == "d0")
        ring.d0 = parse_double(key, v);
    else if (key == "ring_radius")
        ring.ring_radius = parse_double(key, v);
    else if (key == "eta")
        ring.eta = parse_double(key, v);
    else if (key == "scatterers")
        ring.scatterers = parse_size(key, v);
    else if (key == "wavelength")
        ring.wavelength = parse_double(key, v);
    else if (key == "cell_radius")
        ring.cell_radius = parse_double(key, v);
    else if (key == "p_min")
        bounds.p_min = parse_double(key, v);
    else if (key == "p_max")
        bounds.p_max = parse_double(key, v);
    else if (key == "c_min")
        bounds.c_min = parse_double(key, v);
    else if (key == "c_max")
        bounds.c_max = parse_double(key, v);
    else
        throw ConfigError("unknown configuration key '" + key + "'");
}

std::vector<std::string> RunConfig::describe() const
{
    return {"preset=" + preset,
            "m=" + std::to_string(m),
            "k=" + std::to_string(k),
            "variant=" + variant,
            "depth=" + std::to_string(depth),
            "width=" + std::to_string(width),
            "batch=" + std::to_string(batch),
            "max_iter=" + std::to_string(max_iter),
            "val_interval=" + std::to_string(val_interval),
            "patience=" + std::to_string(patience),
            "lr=" + fmt(lr),
            "lr_decay=" + fmt(lr_decay),
            "lr_patience=" + std::to_string(lr_patience),
            "stats_samples=" + std::to_string(stats_samples),
            "n_val=" + std::to_string(n_val),
            "n_test=" + std::to_string(n_test),
            "seed=" + std::to_string(seed),
            "threads=" + std::to_string(threads),
            "ls_restarts=" + std::to_string(ls_restarts),
            "ls_max_iter=" + std::to_string(ls_max_iter),
            "ls_tol=" + fmt(ls_tol),
            "ls_step=" + fmt(ls_step),
            "d0=" + fmt(ring.d0),
            "ring_radius=" + fmt(ring.ring_radius),
            "eta=" + fmt(ring.eta),
            "scatterers=" + std::to_string(ring.scatterers),
            "wavelength=" + fmt(ring.wavelength),
            "cell_radius=" + fmt(ring.cell_radius),
            "p_min=" + fmt(bounds.p_min),
            "p_max=" + fmt(bounds.p_max),
            "c_min=" + fmt(bounds.c_min),
            "c_max=" + fmt(bounds.c_max)};
}

LocalSearchConfig RunConfig::local_search() const
{
    LocalSearchConfig c;
    c.initial_step = ls_step;
    c.max_iterations = ls_max_iter;
    c.tolerance = ls_tol;
    c.restarts = ls_restarts;
    c.validate();
    return c;
}

RunConfig preset(const std::string &name)
{
    RunConfig rc;
    rc.preset = name;
    if (name == "desk")
        return rc;
    if (name == "paper")
    {
        rc.m = 6;
        rc.k = 6;
        rc.depth = 11;
        rc.width = 480;
        rc.batch = 10000;
        return rc;
    }
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

std::map<std::string, std::string> read_config_file(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::uint64_t derived_seed(std::uint64_t master, std::uint64_t purpose)
{
    return splitmix64(splitmix64(master) + purpose * 0x9e3779b97f4a7c15ULL);
}

std::string git_describe()
{
    return CRAN_GIT_DESCRIBE;
}

void write_csv_metadata(std::ostream &os, const std::string &command, const RunConfig &rc,
                        const std::vector<std::string> &extra)
{
    os << "# cranopt " << git_describe() << "\n";
    os << "# command=" << command << "\n";
    os << "# seed=" << rc.seed << "\n";
    for (const auto &kv : rc.describe())
        os << "# config." << kv << "\n";
    for (const auto &kv : extra)
        os << "# " << kv << "\n";
}

// ---- commands --------------------------------------------------------------------------

namespace
{

std::ofstream open_output(const std::string &path)
{
    const std::filesystem::path p(path);
    if (p.has_parent_path() && !std::filesystem::is_directory(p.parent_path()))
        throw IoError("output directory does not exist: " + p.parent_path().string());
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError("cannot open for writing: " + path);
    return os;
}

void finish_output(std::ofstream &os, const std::string &path)
{
    os.flush();
    if (!os)
        throw IoError("failed writing: " + path);
}

TrainConfig train_config(const RunConfig &rc)
{
    TrainConfig c;
    c.variant = variant_from_string(rc.variant);
    c.num_aps = rc.m;
    c.num_ues = rc.k;
    c.depth = rc.depth;
    c.hidden_width = rc.width;
    c.batch_size = rc.batch;
    c.max_iterations = rc.max_iter;
    c.validation_interval = rc.val_interval;
    c.patience = rc.patience;
    c.learning_rate = rc.lr;
    c.lr_decay = rc.lr_decay;
    c.lr_patience = rc.lr_patience;
    c.stats_samples = rc.stats_samples;
    c.seed = derived_seed(rc.seed, kModelInit);
    c.threads = rc.threads;
    c.validate();
    return c;
}

double sample_std(const std::vector<double> &x, double mean)
{
    if (x.size() < 2)
        return 0.0;
    double s = 0.0;
    for (double v : x)
        s += (v - mean) * (v - mean);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double percentile95(std::vector<double> x)
{
    if (x.empty())
        return 0.0;
    std::sort(x.begin(), x.end());
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(x.size()))) - 1;
    return x[std::min(idx, x.size() - 1)];
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

int cmd_generate(const RunConfig &rc, std::size_t n, const std::string &out_path, std::ostream &out)
{
    if (n == 0)
        throw ConfigError("generate: --n must be positive");
    const auto data = generate_dataset(n, rc.m, rc.k, rc.ring, rc.bounds, rc.seed, rc.threads);
    write_dataset(out_path, data, DatasetMetadata{rc.ring, rc.bounds, rc.seed});
    out << "generated " << n << " samples (M=" << rc.m << ", K=" << rc.k << ", seed=" << rc.seed << ") -> "
        << out_path << "\n";
    return kOk;
}

struct TrainArgs
{
    std::string checkpoint;
    std::string log;
    std::string train_data;
    std::string val_data;
};

int cmd_train(const RunConfig &rc, const TrainArgs &args, std::ostream &out, std::ostream &err)
{
    TrainConfig cfg = train_config(rc);
    std::vector<SystemInstance> validation;
    if (!args.val_data.empty())
        validation = to_instances(read_dataset(args.val_data));
    else
        validation = to_instances(
            generate_dataset(rc.n_val, rc.m, rc.k, rc.ring, rc.bounds, derived_seed(rc.seed, kValidationSet), rc.threads));

    std::unique_ptr<BatchSource> source;
    if (!args.train_data.empty())
        source = std::make_unique<DatasetSource>(read_dataset(args.train_data), derived_seed(rc.seed, kTrainStream));
    else
        source = std::make_unique<OnlineSource>(rc.m, rc.k, rc.ring, rc.bounds, derived_seed(rc.seed, kTrainStream));

    // fail on an unwritable log before spending time on training
    std::ofstream log = open_output(args.log);
    {
        std::ofstream probe = open_output(args.checkpoint);
    }
    cfg.checkpoint_path = args.checkpoint;

    TrainResult result;
    try
    {
        result = train(cfg, *source, validation, [&](const HistoryRow &r) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "iter %zu  train_loss %.6f  val_sum_rate %.6f  lr %.3g\n", r.iteration,
                          r.train_loss, r.val_sum_rate, r.learning_rate);
            out << buf << std::flush;
        });
    }
    catch (const NonFiniteLossError &e)
    {
        err << "error: training aborted: " << e.what() << " (iteration " << e.iteration() << ", sample "
            << e.sample() << ")\n";
        return kVerifyFailed;
    }
    save_checkpoint(args.checkpoint, result.model);

    std::vector<std::string> extra{"variant=" + rc.variant,
                                   "training_data=" + (args.train_data.empty() ? std::string("online") : args.train_data),
                                   "best_iteration=" + std::to_string(result.report.best_iteration),
                                   "stop_reason=" + result.report.stop_reason};
    write_csv_metadata(log, "train", rc, extra);
    write_history_csv(log, result.report);
    finish_output(log, args.log);

    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "trained %s: %zu iterations (%s), best validation sum-rate %.6f at iteration %zu, %.2f ms/iter\n",
                  rc.variant.c_str(), result.report.iterations_run, result.report.stop_reason.c_str(),
                  result.report.best_val_sum_rate, result.report.best_iteration, result.report.mean_iteration_ms);
    out << buf;
    return kOk;
}

std::vector<SystemInstance> test_instances(const RunConfig &rc, std::size_t m, std::size_t k,
                                           const std::string &data_path)
{
    if (!data_path.empty())
        return to_instances(read_dataset(data_path));
    if (rc.n_test == 0)
        throw ConfigError("n_test must be positive");
    return to_instances(
        generate_dataset(rc.n_test, m, k, rc.ring, rc.bounds, derived_seed(rc.seed, kTestSet), rc.threads));
}

int cmd_eval(const RunConfig &rc, const std::string &ckpt, const std::string &data_path, const std::string &out_path,
             std::ostream &out)
{
    const Checkpoint ck = load_checkpoint(ckpt);
    const MlpModel &model = ck.model;
    const auto test = test_instances(rc, model.config.num_aps, model.config.num_ues, data_path);
    for (const auto &inst : test)
        if (inst.h().rows() != model.config.num_aps || inst.h().cols() != model.config.num_ues)
            throw ConfigError("eval: dataset dimensions do not match the checkpoint");
    const EvalReport r = evaluate(model, test, rc.threads);
    if (!out_path.empty())
    {
        std::ofstream os = open_output(out_path);
        write_csv_metadata(os, "eval", rc, {"variant=" + to_string(model.config.variant)});
        os << "index,sum_rate\n";
        char buf[64];
        for (std::size_t i = 0; i < r.per_sample.size(); ++i)
        {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, r.per_sample[i]);
            os << buf;
        }
        finish_output(os, out_path);
    }
    char buf[240];
    std::snprintf(buf, sizeof buf, "%s: mean sum-rate %.6f over %zu samples, %zu feasibility violations\n",
                  to_string(model.config.variant).c_str(), r.mean_sum_rate, test.size(), r.violations);
    out << buf;
    return r.violations == 0 && r.nonfinite == 0 ? kOk : kVerifyFailed;
}

struct SweepArgs
{
    std::string axis;
    std::string values;
    std::string methods = "proposed,dilearn,mrt,local_search";
    double fixed_snr_db = 20.0;
    double fixed_capacity = 10.0;
    std::string proposed_ckpt;
    std::string dilearn_ckpt;
    std::string out;
};

int cmd_sweep(const RunConfig &rc, const SweepArgs &args, std::ostream &out)
{
    if (args.axis != "snr" && args.axis != "capacity")
        throw ConfigError("sweep: --axis must be snr or capacity");
    std::vector<double> values;
    const std::string vs = args.values.empty() ? (args.axis == "snr" ? "0,10,20,30" : "2,6,10") : args.values;
    for (const auto &v : split_list(vs))
        values.push_back(parse_double("values", v));
    const auto methods = split_list(args.methods);
    if (values.empty() || methods.empty())
        throw ConfigError("sweep: need at least one axis value and one method");

    std::optional<MlpModel> proposed;
    std::optional<MlpModel> dilearn;
    std::size_t m = rc.m;
    std::size_t k = rc.k;
    for (const auto &name : methods)
    {
        if (name == "proposed" || name == "dilearn")
        {
            const std::string &path = name == "proposed" ? args.proposed_ckpt : args.dilearn_ckpt;
            if (path.empty())
                throw ConfigError("sweep: method " + name + " needs --" + name + "-ckpt");
            MlpModel model = load_checkpoint(path).model;
            if (to_string(model.config.variant) != name)
                throw ConfigError("sweep: checkpoint " + path + " holds a " + to_string(model.config.variant) +
                                  " network");
            m = model.config.num_aps;
            k = model.config.num_ues;
            (name == "proposed" ? proposed : dilearn) = std::move(model);
        }
        else if (name != "mrt" && name != "local_search")
            throw ConfigError("sweep: unknown method '" + name + "'");
    }
    if (proposed && dilearn &&
        (proposed->config.num_aps != dilearn->config.num_aps || proposed->config.num_ues != dilearn->config.num_ues))
        throw ConfigError("sweep: checkpoints disagree on (M, K)");
    if (rc.n_test == 0)
        throw ConfigError("n_test must be positive");

    // one channel set shared by every axis point; only P or C changes
    const auto base = generate_dataset(rc.n_test, m, k, rc.ring, rc.bounds, derived_seed(rc.seed, kTestSet), rc.threads);
    const LocalSearchConfig ls_base = rc.local_search();
    const std::uint64_t ls_seed = derived_seed(rc.seed, kLocalSearch);

    std::ofstream os = open_output(args.out);
    std::vector<std::string> extra{"axis=" + args.axis, "values=" + vs, "methods=" + args.methods,
                                   "fixed_snr_db=" + fmt(args.fixed_snr_db),
                                   "fixed_capacity=" + fmt(args.fixed_capacity), "M=" + std::to_string(m),
                                   "K=" + std::to_string(k)};
    write_csv_metadata(os, "sweep", rc, extra);
    os << "axis_value,method,mean_rate,std_rate,n\n";

    for (double value : values)
    {
        std::vector<ChannelSample> samples = base;
        for (auto &s : samples)
        {
            if (args.axis == "snr")
            {
                s.power_budget = std::pow(10.0, value / 10.0);
                s.capacity = args.fixed_capacity;
            }
            else
            {
                s.power_budget = std::pow(10.0, args.fixed_snr_db / 10.0);
                s.capacity = value;
            }
        }
        const auto insts = to_instances(samples);
        for (const auto &name : methods)
        {
            std::vector<double> rates(insts.size(), 0.0);
            if (name == "proposed" || name == "dilearn")
                rates = evaluate(name == "proposed" ? *proposed : *dilearn, insts, rc.threads).per_sample;
            else if (name == "mrt")
                parallel_for(insts.size(), rc.threads, [&](std::size_t i) {
                    const Solution s = mrt_uniform(insts[i]);
                    rates[i] = sum_rate(insts[i].h(), s.v, s.omega);
                });
            else
                parallel_for(insts.size(), rc.threads, [&](std::size_t i) {
                    LocalSearchConfig c = ls_base;
                    c.seed = ls_seed + i;
                    rates[i] = local_search(insts[i], c).sum_rate;
                });
            double mean = 0.0;
            for (double r : rates)
                mean += r;
            mean /= static_cast<double>(rates.size());
            char buf[200];
            std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%zu\n", value, name.c_str(), mean,
                          sample_std(rates, mean), rates.size());
            os << buf;
            std::snprintf(buf, sizeof buf, "%s=%g  %-12s mean %.6f\n", args.axis.c_str(), value, name.c_str(), mean);
            out << buf << std::flush;
        }
    }
    finish_output(os, args.out);
    return kOk;
}

struct BenchArgs
{
    std::string methods = "proposed,dilearn,mrt,local_search";
    std::string proposed_ckpt;
    std::string dilearn_ckpt;
    std::size_t repeats = 5;
    std::string out;
};

int cmd_bench_time(const RunConfig &rc, const BenchArgs &args, std::ostream &out)
{
    using clock = std::chrono::steady_clock;
    const auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    const auto insts = test_instances(rc, rc.m, rc.k, "");
    const Matrix inputs = build_input_batch(std::span<const SystemInstance>(insts));
    const auto methods = split_list(args.methods);

    std::ofstream os = open_output(args.out);
    write_csv_metadata(os, "bench-time", rc, {"methods=" + args.methods, "repeats=" + std::to_string(args.repeats)});
    os << "method,mode,weights,mean_ms,p95_ms,n\n";
    char buf[240];
    auto emit = [&](const std::string &method, const std::string &mode, const std::string &weights,
                    const std::vector<double> &t) {
        double mean = 0.0;
        for (double x : t)
            mean += x;
        mean /= static_cast<double>(t.size());
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.6g,%.6g,%zu\n", method.c_str(), mode.c_str(), weights.c_str(), mean,
                      percentile95(t), t.size());
        os << buf;
        std::snprintf(buf, sizeof buf, "%-13s %-8s mean %10.4f ms  p95 %10.4f ms\n", method.c_str(), mode.c_str(), mean,
                      percentile95(t));
        out << buf << std::flush;
    };

    for (const auto &name : methods)
    {
        if (name == "proposed" || name == "dilearn")
        {
            const std::string &path = name == "proposed" ? args.proposed_ckpt : args.dilearn_ckpt;
            MlpModel model;
            std::string weights = "checkpoint";
            if (!path.empty())
                model = load_checkpoint(path).model;
            else
            {
                // timing does not depend on the weight values
                RunConfig tmp = rc;
                tmp.variant = name;
                model = MlpModel::init(train_config(tmp).model_config(), derived_seed(rc.seed, kModelInit));
                fit_input_normalization(model, inputs);
                finalize_statistics(model, inputs);
                weights = "untrained";
            }
            if (model.config.num_aps != rc.m || model.config.num_ues != rc.k)
                throw ConfigError("bench-time: checkpoint dimensions differ from --m/--k");
            const Variant v = model.config.variant;
            double sink = 0.0;
            // batched: one eval-mode pass over the whole set, amortised per sample
            sink += predict(model, inputs)(0, 0); // warm-up, untimed
            std::vector<double> batched;
            for (std::size_t r = 0; r < std::max<std::size_t>(args.repeats, 1); ++r)
            {
                const auto t0 = clock::now();
                const Matrix o = predict(model, inputs);
                for (std::size_t i = 0; i < insts.size(); ++i)
                    sink += solution_from_output(v, insts[i], o.col(static_cast<Eigen::Index>(i))).omega.omega[0];
                batched.push_back(ms_since(t0) / static_cast<double>(insts.size()));
            }
            emit(name, "batched", weights, batched);
            std::vector<double> single;
            for (std::size_t i = 0; i < insts.size(); ++i)
            {
                const auto t0 = clock::now();
                const Matrix o = predict(model, inputs.col(static_cast<Eigen::Index>(i)));
                sink += solution_from_output(v, insts[i], o.col(0)).omega.omega[0];
                single.push_back(ms_since(t0));
            }
            emit(name, "single", weights, single);
            if (!std::isfinite(sink))
                out << "note: non-finite outputs during timing\n";
        }
        else if (name == "mrt")
        {
            std::vector<double> t;
            for (const auto &inst : insts)
            {
                const auto t0 = clock::now();
                (void)mrt_uniform(inst);
                t.push_back(ms_since(t0));
            }
            emit(name, "single", "-", t);
        }
        else if (name == "local_search")
        {
            const LocalSearchConfig base = rc.local_search();
            const std::uint64_t ls_seed = derived_seed(rc.seed, kLocalSearch);
            std::vector<double> t;
            for (std::size_t i = 0; i < insts.size(); ++i)
            {
                LocalSearchConfig c = base;
                c.seed = ls_seed + i;
                const auto t0 = clock::now();
                (void)local_search(insts[i], c);
                t.push_back(ms_since(t0));
            }
            emit(name, "single", "-", t);
        }
        else
            throw ConfigError("bench-time: unknown method '" + name + "'");
    }
    finish_output(os, args.out);
    return kOk;
}

std::string dashed(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
}

} // namespace

// ---- entry point ------------------------------------------------------------------------

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"cranopt: learned beamforming and fronthaul quantisation for cloud radio access networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", git_describe());

    std::string preset_name;
    std::string config_path;
    std::map<std::string, std::string> overrides;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--preset", preset_name, "Parameter preset: desk or paper");
        sub->add_option("--config", config_path, "Flat key=value configuration file");
        for (const auto &key : config_keys())
            sub->add_option_function<std::string>(
                dashed(key), [&overrides, key](const std::string &v) { overrides[key] = v; },
                "Override configuration key '" + key + "'");
    };

    std::size_t gen_n = 0;
    std::string gen_out;
    auto *gen = app.add_subcommand("generate", "Sample a dataset of channel realisations");
    add_common(gen);
    gen->add_option("--n", gen_n, "Number of samples")->required();
    gen->add_option("--out", gen_out, "Output dataset path")->required();

    TrainArgs targs;
    auto *trn = app.add_subcommand("train", "Train the proposed or the direct-output network");
    add_common(trn);
    trn->add_option("--checkpoint", targs.checkpoint, "Checkpoint output path")->required();
    trn->add_option("--log", targs.log, "Training log CSV path")->required();
    trn->add_option("--train-data", targs.train_data, "Fixed training dataset (default: sample online)");
    trn->add_option("--val-data", targs.val_data, "Validation dataset (default: generated from the seed)");

    std::string eval_ckpt;
    std::string eval_data;
    std::string eval_out;
    auto *evl = app.add_subcommand("eval", "Evaluate a checkpoint");
    add_common(evl);
    evl->add_option("--checkpoint", eval_ckpt, "Checkpoint to evaluate")->required();
    evl->add_option("--data", eval_data, "Test dataset (default: generated from the seed)");
    evl->add_option("--out", eval_out, "Per-sample CSV output");

    SweepArgs sargs;
    auto *swp = app.add_subcommand("sweep", "Mean sum-rate versus SNR or fronthaul capacity");
    add_common(swp);
    swp->add_option("--axis", sargs.axis, "snr or capacity")->required();
    swp->add_option("--values", sargs.values, "Comma-separated axis values (dB for snr)");
    swp->add_option("--methods", sargs.methods, "Comma-separated subset of proposed,dilearn,mrt,local_search");
    swp->add_option("--fixed-snr", sargs.fixed_snr_db, "SNR in dB held fixed on the capacity axis");
    swp->add_option("--fixed-capacity", sargs.fixed_capacity, "Capacity held fixed on the snr axis");
    swp->add_option("--proposed-ckpt", sargs.proposed_ckpt, "Checkpoint of the proposed network");
    swp->add_option("--dilearn-ckpt", sargs.dilearn_ckpt, "Checkpoint of the direct-output network");
    swp->add_option("--out", sargs.out, "Output CSV")->required();

    BenchArgs bargs;
    auto *bch = app.add_subcommand("bench-time", "Per-sample run time of every method");
    add_common(bch);
    bch->add_option("--methods", bargs.methods, "Comma-separated subset of proposed,dilearn,mrt,local_search");
    bch->add_option("--proposed-ckpt", bargs.proposed_ckpt, "Checkpoint of the proposed network");
    bch->add_option("--dilearn-ckpt", bargs.dilearn_ckpt, "Checkpoint of the direct-output network");
    bch->add_option("--repeats", bargs.repeats, "Repetitions of the batched pass");
    bch->add_option("--out", bargs.out, "Output CSV")->required();

    VerifyOptions vopts;
    std::string fault;
    auto *ver = app.add_subcommand("verify", "Run the property suites");
    add_common(ver);
    ver->add_option("--samples", vopts.feasibility_samples, "Random draws for the feasibility and direction suites");
    ver->add_option("--gradient-configs", vopts.gradient_configs, "Random networks per variant in the gradient suite");
    ver->add_option("--inject-fault", fault, "Deliberate defect to demonstrate a failure: scale");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try
    {
        std::map<std::string, std::string> file;
        if (!config_path.empty())
            file = read_config_file(config_path);
        std::string name = "desk";
        if (!preset_name.empty())
            name = preset_name;
        else if (file.count("preset"))
            name = file.at("preset");
        RunConfig rc = preset(name);
        if (const char *env = std::getenv("CRAN_SEED"); env && *env)
            rc.set("seed", env);
        for (const auto &[key, value] : file)
            if (key != "preset")
                rc.set(key, value);
        for (const auto &[key, value] : overrides)
            rc.set(key, value);
        if (rc.threads < 1)
            throw ConfigError("threads must be at least 1");
        rc.ring.validate();
        rc.bounds.validate();

        if (*gen)
            return cmd_generate(rc, gen_n, gen_out, out);
        if (*trn)
            return cmd_train(rc, targs, out, err);
        if (*evl)
            return cmd_eval(rc, eval_ckpt, eval_data, eval_out, out);
        if (*swp)
            return cmd_sweep(rc, sargs, out);
        if (*bch)
            return cmd_bench_time(rc, bargs, out);
        if (*ver)
        {
            if (!fault.empty() && fault != "scale")
                throw ConfigError("verify: unknown fault '" + fault + "' (expected scale)");
            vopts.seed = rc.seed;
            vopts.inject_scale_fault = fault == "scale";
            return run_verify(vopts, out);
        }
        return kUsage;
    }
    catch (const ConfigError &e)
    {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    catch (const IoError &e)
    {
        err << "error: " << e.what() << "\n";
        return kIo;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        err << "error: " << e.what() << "\n";
        return kIo;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return kVerifyFailed;
    }
}

} // namespace cran::cli
