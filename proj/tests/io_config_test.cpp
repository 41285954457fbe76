// Copyright 2026 The evs-toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "evs/config.hpp"
#include "evs/densities.hpp"
#include "evs/experiment.hpp"
#include "evs/io.hpp"
#include "test_util.hpp"

namespace evs {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

class TempDir {
  public:
    TempDir() {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / ("evs_io_" + std::string(info->test_suite_name()) + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
    [[nodiscard]] const fs::path &path() const { return path_; }
    fs::path write(const std::string &name, const std::string &text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p;
    }

  private:
    fs::path path_;
};

std::vector<std::string> config_errors(const std::string &text) {
    try {
        (void)parse_config_text(text);
    } catch (const ConfigError &e) {
        return e.errors();
    }
    return {};
}

bool any_contains(const std::vector<std::string> &v, const std::string &needle) {
    return std::any_of(v.begin(), v.end(), [&](const auto &s) { return s.find(needle) != std::string::npos; });
}

EvsModel small_product_model() {
    FitConfig cfg;
    cfg.grid_points_per_dim = 8;
    cfg.max_iters = 40;
    cfg.seed = 2;
    return build_product_encoder(truncate_density(densities::uniform(), 1, 1, 0, 32), 2, cfg);
}

TEST(Csv, SeventeenSignificantDigits) {
    EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(io::format_double(-1.0), "-1");
}

TEST(Csv, RoundTripIsBitExact) {
    Rng rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto s = testing::random_samples(rng, static_cast<std::size_t>(testing::uniform_int(rng, 1, 50)),
                                               static_cast<std::size_t>(testing::uniform_int(rng, 1, 4)), -1e3, 1e3);
        const auto back = io::samples_from_csv(io::samples_to_csv(s, {"a comment"}));
        ASSERT_EQ(back.rows, s.rows);
        ASSERT_EQ(back.dims, s.dims);
        EXPECT_EQ(back.values, s.values);
    }
}

TEST(Csv, LayoutHasHeaderCommentsAndNewlines) {
    const auto s = SampleSet::from_values(2, 2, {0.5, -0.25, 1.0, 0.0});
    EXPECT_EQ(io::samples_to_csv(s, {"k=v"}), "# k=v\ny1,y2\n0.5,-0.25\n1,0\n");
}

TEST(Csv, MalformedInputRejected) {
    EXPECT_THROW((void)io::samples_from_csv("a,b\n1,2\n"), ValidationError);
    EXPECT_THROW((void)io::samples_from_csv("y1,y2\n1\n"), ValidationError);
    EXPECT_THROW((void)io::samples_from_csv("y1\nabc\n"), ValidationError);
    EXPECT_THROW((void)io::samples_from_csv("y1\nnan\n"), ValidationError);
    EXPECT_THROW((void)io::samples_from_csv("# only a comment\n"), ValidationError);
}

TEST(Csv, AcceptsCrlf) {
    const auto s = io::samples_from_csv("y1\r\n0.5\r\n");
    ASSERT_EQ(s.rows, 1U);
    EXPECT_EQ(s.values[0], 0.5);
}

TEST(Csv, SidecarCarriesMetadata) {
    TempDir dir;
    auto s = SampleSet::from_values(3, 1, {0.1, 0.2, 0.3});
    s.meta.seed = 42;
    s.meta.mode = SampleMode::shots;
    s.meta.shots = 100;
    s.meta.model_id = "m";
    const auto csv = dir.path() / "sub" / "s.csv";
    io::write_samples(s, csv, "abc123");
    EXPECT_TRUE(fs::exists(io::metadata_path(csv)));
    EXPECT_FALSE(fs::exists(dir.path() / "sub" / "s.csv.tmp"));
    const auto meta = io::json::parse(io::read_file(io::metadata_path(csv)));
    EXPECT_EQ(meta["config_hash"], "abc123");
    EXPECT_EQ(meta["N"], 3);
    EXPECT_EQ(meta["shots"], 100);
    const auto back = io::read_samples(csv);
    EXPECT_EQ(back.values, s.values);
    EXPECT_EQ(back.meta.seed, 42U);
    EXPECT_EQ(back.meta.mode, SampleMode::shots);
    EXPECT_NE(io::read_file(csv).find("config_hash=abc123"), std::string::npos);
}

TEST(GridDensityFiles, CsvAndBinaryRoundTrip) {
    TempDir dir;
    const auto g = truncate_density(densities::correlated_gaussian_2d(0.5), 2, 2, 0, 16);
    for (auto fmt : {io::PayloadFormat::csv, io::PayloadFormat::binary}) {
        const auto stem = dir.path() / (fmt == io::PayloadFormat::csv ? "c" : "b");
        io::write_grid_density(g, stem, fmt);
        const auto back = io::read_grid_density(stem);
        EXPECT_EQ(back.dims, g.dims);
        EXPECT_EQ(back.resolution, g.resolution);
        EXPECT_EQ(back.half_width, g.half_width);
        EXPECT_EQ(back.retained_mass, g.retained_mass);
        EXPECT_EQ(back.values, g.values);
    }
    EXPECT_TRUE(fs::exists(dir.path() / "b.values.bin"));
    EXPECT_TRUE(fs::exists(dir.path() / "c.values.csv"));
}

TEST(GridDensityFiles, TruncatedPayloadRejected) {
    TempDir dir;
    const auto g = truncate_density(densities::standard_normal(), 1, 2, 0, 8);
    io::write_grid_density(g, dir.path() / "g");
    std::ofstream(dir.path() / "g.values.csv") << "0.5\n";
    EXPECT_THROW((void)io::read_grid_density(dir.path() / "g"), ValidationError);
}

TEST(ModelFiles, ProductModelRoundTripSamplesIdentically) {
    TempDir dir;
    const auto m = small_product_model();
    io::save_model(m, dir.path() / "m.json", "h");
    const auto back = io::load_model(dir.path() / "m.json");
    EXPECT_EQ(back.kind, m.kind);
    EXPECT_EQ(back.weights, m.weights);
    EXPECT_EQ(sample_exact(back, 200, 3).values, sample_exact(m, 200, 3).values);
    const auto j = io::json::parse(io::read_file(dir.path() / "m.json"));
    EXPECT_EQ(j["format"], "evs-model");
    EXPECT_EQ(j["version"], io::kModelFormatVersion);
    EXPECT_EQ(j["config_hash"], "h");
}

TEST(ModelFiles, DenseModelRoundTripSamplesIdentically) {
    TempDir dir;
    const auto m = build_dense_encoder(truncate_density(densities::standard_normal(), 2, 2, 0, 12));
    io::save_model(m, dir.path() / "d.json");
    const auto back = io::load_model(dir.path() / "d.json");
    EXPECT_EQ(sample_exact(back, 100, 4).values, sample_exact(m, 100, 4).values);
}

TEST(ModelFiles, CircuitAndObservablesRoundTrip) {
    Rng rng(3);
    const auto c = testing::random_circuit(rng, 3, 25, 2);
    const auto c2 = io::circuit_from_json(io::circuit_json(c));
    const auto w = testing::random_vector(rng, c.num_weights(), -3, 3);
    const std::vector<double> x{0.2, 0.7};
    const auto a = run_circuit(c, w, x), b = run_circuit(c2, w, x);
    for (std::size_t i = 0; i < a.amplitudes().size(); ++i) {
        EXPECT_EQ(a.amplitudes()[i], b.amplitudes()[i]);
    }
    const auto dense = Observable::dense(testing::random_hermitian(rng, 2));
    EXPECT_EQ(io::observable_from_json(io::observable_json(dense)).to_dense(), dense.to_dense());
    const auto pauli = Observable::pauli(2, {PauliTerm{0.5, "XZ"}, PauliTerm{-1.5, "YY"}});
    EXPECT_EQ(io::observable_from_json(io::observable_json(pauli)).to_dense(), pauli.to_dense());
}

TEST(ModelFiles, BadFilesRejected) {
    TempDir dir;
    const auto m = small_product_model();
    auto j = io::model_json(m);
    j["version"] = 99;
    std::ofstream(dir.path() / "v.json") << j.dump();
    EXPECT_THROW((void)io::load_model(dir.path() / "v.json"), ValidationError);
    std::ofstream(dir.path() / "g.json") << "{not json";
    EXPECT_THROW((void)io::load_model(dir.path() / "g.json"), ValidationError);
    EXPECT_THROW((void)io::load_model(dir.path() / "missing.json"), ValidationError);
}

TEST(Config, MinimalConfigParses) {
    const auto c = parse_config_text("seed = 7\n[target]\nfamily = uniform1d\n[encoder]\nkind = product\nlayers = 4\n"
                                     "[sample]\nn = 1000\n");
    EXPECT_EQ(c.seed, 7U);
    ASSERT_TRUE(c.target && c.encoder && c.sample);
    EXPECT_EQ(c.encoder->layers, 4);
    EXPECT_EQ(c.sample->n, 1000U);
    EXPECT_TRUE(missing_for_command(c, "sample").empty());
}

TEST(Config, MissingSeedNamed) {
    const auto e = config_errors("[target]\nfamily = uniform1d\n");
    ASSERT_FALSE(e.empty());
    EXPECT_TRUE(any_contains(e, "seed"));
}

TEST(Config, UnknownEncoderListsAllowedValues) {
    const auto e = config_errors("seed = 1\n[encoder]\nkind = magic\n");
    EXPECT_TRUE(any_contains(e, "encoder.kind"));
    EXPECT_TRUE(any_contains(e, "product"));
    EXPECT_TRUE(any_contains(e, "dense"));
}

TEST(Config, CollectsEveryError) {
    const auto e = config_errors("[encoder]\nkind = magic\nlayers = many\ncolour = red\n[bogus]\nx = 1\n");
    EXPECT_GE(e.size(), 5U);
    EXPECT_TRUE(any_contains(e, "seed"));
    EXPECT_TRUE(any_contains(e, "encoder.layers"));
    EXPECT_TRUE(any_contains(e, "encoder.colour: unknown key"));
    EXPECT_TRUE(any_contains(e, "bogus"));
}

TEST(Config, TypeMismatchReported) {
    const auto e = config_errors("seed = 1\n[sample]\nn = 3.5\nepsilon = small\n");
    EXPECT_TRUE(any_contains(e, "sample.n"));
    EXPECT_TRUE(any_contains(e, "sample.epsilon"));
}

TEST(Config, RelativePathsResolveAgainstConfigDir) {
    TempDir dir;
    dir.write("a.csv", "y1\n0\n");
    const auto cfg = dir.write("c.ini", "seed = 1\n[w1]\na = a.csv\nb = a.csv\n");
    const auto c = parse_config(cfg);
    ASSERT_TRUE(c.w1);
    EXPECT_TRUE(fs::exists(c.w1->a));
    EXPECT_TRUE(any_contains(config_errors("seed = 1\n[w1]\na = /nonexistent/a.csv\n"), "w1.a"));
}

TEST(Config, CommandRequirementsChecked) {
    const auto c = parse_config_text("seed = 1\n");
    EXPECT_TRUE(any_contains(missing_for_command(c, "sample"), "sample.n"));
    EXPECT_TRUE(any_contains(missing_for_command(c, "check"), "check.n_qubits"));
    EXPECT_TRUE(any_contains(missing_for_command(c, "launch"), "allowed values"));
}

TEST(Config, HashTracksTextAndSeed) {
    auto a = parse_config_text("seed = 1\n");
    const auto b = parse_config_text("seed = 1\n; note\n");
    EXPECT_NE(a.hash(), b.hash());
    const auto h = a.hash();
    a.seed = 2;
    EXPECT_NE(a.hash(), h);
    EXPECT_EQ(h.size(), 16U);
}

TEST(Execute, ValidationFailuresMapToExitOne) {
    const auto c = parse_config_text("seed = 1\n");
    std::ostringstream err;
    EXPECT_EQ(execute(c, "sample", fs::temp_directory_path() / "evs_unused", err).exit_code, kExitValidation);
    EXPECT_NE(err.str().find("sample.n"), std::string::npos);
}

#ifdef EVS_CLI_PATH

int run_cli(const std::string &args) {
    const std::string cmd = std::string(EVS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char *kSampleIni = "seed = 7\n[target]\nfamily = uniform1d\n[encoder]\nkind = product\nlayers = 2\n"
                         "[fit]\ngrid_points = 8\nmax_iters = 30\n[sample]\nn = 200\n";

TEST(Cli, InfeasibleCheckStillSucceeds) {
    TempDir dir;
    const auto cfg = dir.write("c.ini", "seed = 0\ncommand = check\n[check]\nn_qubits = 1\noutput_dim = 4\n"
                                        "epsilon = 0.1\nobservable = Z\n");
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --out " + dir.path().string()), 0);
    const auto j = io::json::parse(io::read_file(dir.path() / "check.json"));
    EXPECT_FALSE(j["feasible"].get<bool>());
    bool dim_failed = false;
    for (const auto &c : j["checks"]) {
        if (c["name"] == "dimension") {
            dim_failed = !c["passed"].get<bool>();
        }
    }
    EXPECT_TRUE(dim_failed);
}

TEST(Cli, SampleIsReproducible) {
    TempDir dir;
    const auto cfg = dir.write("s.ini", kSampleIni);
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --command sample --out " + (dir.path() / "a").string()), 0);
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --command sample --out " + (dir.path() / "b").string()), 0);
    EXPECT_EQ(io::read_file(dir.path() / "a" / "samples.csv"), io::read_file(dir.path() / "b" / "samples.csv"));
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --command sample --seed 8 --out " + (dir.path() / "c").string()),
              0);
    EXPECT_NE(io::read_file(dir.path() / "a" / "samples.csv"), io::read_file(dir.path() / "c" / "samples.csv"));
}

TEST(Cli, FitThenSampleFromModelMatches) {
    TempDir dir;
    const auto cfg = dir.write("s.ini", kSampleIni);
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --command fit --out " + dir.path().string()), 0);
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --command sample --out " + (dir.path() / "direct").string()), 0);
    const auto cfg2 = dir.write("m.ini", "seed = 7\n[sample]\nn = 200\nmodel = model.json\n");
    ASSERT_EQ(run_cli("--config " + cfg2.string() + " --command sample --out " + (dir.path() / "loaded").string()), 0);
    EXPECT_EQ(io::read_samples(dir.path() / "direct" / "samples.csv").values,
              io::read_samples(dir.path() / "loaded" / "samples.csv").values);
}

TEST(Cli, W1OfFileAgainstItselfIsZero) {
    TempDir dir;
    io::write_samples(SampleSet::from_values(3, 2, {0, 1, 2, 3, 4, 5}), dir.path() / "a.csv");
    const auto cfg = dir.write("w.ini", "seed = 1\n[w1]\na = a.csv\nb = a.csv\n");
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --command w1 --out " + dir.path().string()), 0);
    const auto j = io::json::parse(io::read_file(dir.path() / "w1.json"));
    EXPECT_EQ(j["value"].get<double>(), 0.0);
    EXPECT_EQ(j["name"], "w1_exact");
}

TEST(Cli, BadConfigExitsOne) {
    TempDir dir;
    const auto cfg = dir.write("bad.ini", "[encoder]\nkind = magic\n");
    EXPECT_EQ(run_cli("--config " + cfg.string() + " --command sample --out " + dir.path().string()), 1);
    EXPECT_EQ(run_cli("--config " + (dir.path() / "absent.ini").string() + " --command check"), 1);
    const auto ok = dir.write("ok.ini", "seed = 1\n");
    EXPECT_EQ(run_cli("--config " + ok.string() + " --out " + dir.path().string()), 1);
    EXPECT_EQ(run_cli("--config " + ok.string() + " --command nonsense --out " + dir.path().string()), 1);
}

TEST(Cli, EveryArtifactEmbedsTheConfigHash) {
    TempDir dir;
    const auto cfg = dir.write("s.ini", std::string(kSampleIni) +
                                            "[analyze]\ncutoff = 2\nsamples = 64\n[check]\nn_qubits = 2\n"
                                            "output_dim = 3\nepsilon = 0.1\nobservable = ZI\n");
    const auto hash = parse_config(cfg).hash();
    for (const std::string cmd : {"fit", "sample", "analyze-rank", "analyze-fourier", "check"}) {
        ASSERT_EQ(run_cli("--config " + cfg.string() + " --command " + cmd + " --out " + dir.path().string()), 0)
            << cmd;
    }
    const auto w1cfg = dir.write("w.ini", "seed = 1\n[w1]\na = samples.csv\nb = samples.csv\n");
    ASSERT_EQ(run_cli("--config " + w1cfg.string() + " --command w1 --out " + dir.path().string()), 0);
    for (const std::string f : {"model.json", "samples.csv", "samples.csv.meta.json", "rank.json",
                                "rank_eigenvalues.csv", "fourier.csv", "check.json"}) {
        EXPECT_NE(io::read_file(dir.path() / f).find(hash), std::string::npos) << f;
    }
    EXPECT_NE(io::read_file(dir.path() / "w1.json").find(parse_config(w1cfg).hash()), std::string::npos);
}

#endif

} // namespace
} // namespace evs
