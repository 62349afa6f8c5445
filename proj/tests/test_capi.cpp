// Copyright (c) 2026 The irb Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "irb.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("irb_capi_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

irb_synth_params small_params(uint64_t seed) {
  irb_synth_params p;
  p.num_queries = 40;
  p.dim = 16;
  p.sigma_q = 0.5;
  p.lambda = 0.15;
  p.gamma = 1.0;
  p.seed = seed;
  return p;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)), {});
}

}  // namespace

TEST_CASE("status names and version are exposed") {
  CHECK(std::string(irb_version()) == "0.1.0");
  CHECK(std::string(irb_status_name(IRB_OK)) == "ok");
  CHECK(std::string(irb_status_name(IRB_ERR_BAD_MAGIC)) == "bad magic");
}

TEST_CASE("dataset synth, save, load round trip through the C surface") {
  TempDir tmp;
  const irb_synth_params params = small_params(7);
  irb_dataset* ds = nullptr;
  REQUIRE(irb_dataset_synth(&params, &ds) == IRB_OK);
  CHECK(irb_dataset_num_queries(ds) == 40);
  CHECK(irb_dataset_num_items(ds) == 80);
  CHECK(irb_dataset_dim(ds) == 16);
  CHECK(irb_dataset_has_watermark(ds) == 1);

  const std::string dir = (tmp.path / "ds").string();
  REQUIRE(irb_dataset_save(ds, dir.c_str()) == IRB_OK);
  CHECK(fs::exists(tmp.path / "ds" / "queries.emb"));
  CHECK(fs::exists(tmp.path / "ds" / "images.emb"));
  CHECK(fs::exists(tmp.path / "ds" / "metadata.jsonl"));
  CHECK(fs::exists(tmp.path / "ds" / "synth.json"));

  irb_dataset* loaded = nullptr;
  REQUIRE(irb_dataset_load(dir.c_str(), &loaded) == IRB_OK);
  CHECK(irb_dataset_num_queries(loaded) == 40);
  CHECK(irb_dataset_has_watermark(loaded) == 1);

  // saving the loaded dataset reproduces the files byte for byte
  const std::string dir2 = (tmp.path / "ds2").string();
  REQUIRE(irb_dataset_save(loaded, dir2.c_str()) == IRB_OK);
  for (const char* name :
       {"queries.emb", "images.emb", "metadata.jsonl"}) {
    CHECK(slurp(tmp.path / "ds" / name) == slurp(tmp.path / "ds2" / name));
  }

  irb_dataset_free(ds);
  irb_dataset_free(loaded);
}

TEST_CASE("identical synth params give byte-identical directories") {
  TempDir tmp;
  const irb_synth_params params = small_params(9);
  for (const char* dir : {"a", "b"}) {
    irb_dataset* ds = nullptr;
    REQUIRE(irb_dataset_synth(&params, &ds) == IRB_OK);
    REQUIRE(irb_dataset_save(ds, (tmp.path / dir).string().c_str()) == IRB_OK);
    irb_dataset_free(ds);
  }
  for (const char* name :
       {"queries.emb", "images.emb", "metadata.jsonl", "synth.json"}) {
    CHECK(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
  }
}

TEST_CASE("error paths report status and message") {
  irb_dataset* ds = nullptr;
  CHECK(irb_dataset_load("/no/such/dir", &ds) == IRB_ERR_IO);
  CHECK(std::string(irb_last_error()).find("images.emb") !=
        std::string::npos);

  irb_synth_params bad = small_params(1);
  bad.lambda = -2.0;
  CHECK(irb_dataset_synth(&bad, &ds) == IRB_ERR_INVALID_ARGUMENT);

  CHECK(irb_dataset_synth(nullptr, &ds) == IRB_ERR_INVALID_ARGUMENT);

  irb_model* model = nullptr;
  CHECK(irb_model_load("/no/such/model.dem", &model) == IRB_ERR_IO);

  TempDir tmp;
  const fs::path fake = tmp.path / "fake.dem";
  {
    std::ofstream os(fake, std::ios::binary);
    os << "NOPEnope";
  }
  CHECK(irb_model_load(fake.string().c_str(), &model) == IRB_ERR_BAD_MAGIC);
}

TEST_CASE("bias evaluation against identity and saved models") {
  TempDir tmp;
  const irb_synth_params params = small_params(11);
  irb_dataset* ds = nullptr;
  REQUIRE(irb_dataset_synth(&params, &ds) == IRB_OK);

  const uint32_t cutoffs[3] = {1, 3, 5};
  irb_bias_report* report = nullptr;
  REQUIRE(irb_eval_bias(ds, nullptr, cutoffs, 3, &report) == IRB_OK);
  double mr = 0, mg = 0, delta = 0;
  REQUIRE(irb_bias_report_metric(report, IRB_METRIC_NDCG, 1, &mr, &mg,
                                 &delta) == IRB_OK);
  CHECK(delta < 0.0);  // watermark bias visible through identity heads
  CHECK(mr >= 0.0);
  CHECK(mg >= 0.0);
  CHECK(irb_bias_report_metric(report, IRB_METRIC_NDCG, 2, &mr, &mg, &delta) ==
        IRB_ERR_ITEM_NOT_FOUND);

  const fs::path json = tmp.path / "bias.json";
  REQUIRE(irb_bias_report_write_json(report, "{\"run\":\"demo\"}",
                                     json.string().c_str()) == IRB_OK);
  const std::string body = slurp(json);
  CHECK(body.find("\"config\"") != std::string::npos);
  CHECK(body.find("\"run\": \"demo\"") != std::string::npos);
  irb_bias_report_free(report);

  // identity model handle behaves like the null model
  irb_model* identity = nullptr;
  REQUIRE(irb_model_identity(16, 0.05, &identity) == IRB_OK);
  irb_bias_report* report2 = nullptr;
  REQUIRE(irb_eval_bias(ds, identity, cutoffs, 3, &report2) == IRB_OK);
  double delta2 = 0;
  REQUIRE(irb_bias_report_metric(report2, IRB_METRIC_NDCG, 1, nullptr,
                                 nullptr, &delta2) == IRB_OK);
  CHECK(delta2 == delta);
  irb_bias_report_free(report2);

  const fs::path ckpt = tmp.path / "identity.dem";
  REQUIRE(irb_model_save(identity, ckpt.string().c_str()) == IRB_OK);
  irb_model* back = nullptr;
  REQUIRE(irb_model_load(ckpt.string().c_str(), &back) == IRB_OK);
  irb_model_free(identity);
  irb_model_free(back);

  const fs::path csv = tmp.path / "dist.csv";
  const fs::path svg = tmp.path / "dist.svg";
  REQUIRE(irb_write_score_distribution(ds, nullptr, 20, csv.string().c_str(),
                                       svg.string().c_str()) == IRB_OK);
  const std::string csv_body = slurp(csv);
  CHECK(csv_body.rfind("bin_center,count_real,count_generated", 0) == 0);
  CHECK(slurp(svg).rfind("<svg", 0) == 0);

  irb_dataset_free(ds);
}

TEST_CASE("parity and selection through the C surface") {
  TempDir tmp;
  irb_synth_params params = small_params(13);
  params.lambda = 0.0;
  irb_dataset* ds = nullptr;
  REQUIRE(irb_dataset_synth(&params, &ds) == IRB_OK);

  double real_only = 0, gen_only = 0, gap = 0;
  REQUIRE(irb_parity(ds, nullptr, IRB_METRIC_NDCG, 5, &real_only, &gen_only,
                     &gap) == IRB_OK);
  CHECK(gap == 0.0);  // lambda = 0: both corpora identical
  irb_dataset_free(ds);

  // candidate selection across two emb files
  irb_synth_params cand_params = small_params(15);
  irb_dataset* pool = nullptr;
  REQUIRE(irb_dataset_synth(&cand_params, &pool) == IRB_OK);
  REQUIRE(irb_dataset_save(pool, (tmp.path / "pool").string().c_str()) ==
          IRB_OK);
  irb_dataset_free(pool);
  const std::string images = (tmp.path / "pool" / "images.emb").string();
  uint32_t index = 999;
  double similarity = 0.0;
  REQUIRE(irb_select_candidate(images.c_str(), 0, images.c_str(), &index,
                               &similarity) == IRB_OK);
  CHECK(index == 0);  // row 0 matches itself exactly
  CHECK(similarity == doctest::Approx(1.0));
}

TEST_CASE("train, sweep and analyze through the C surface") {
  TempDir tmp;
  irb_synth_params params = small_params(17);
  params.num_queries = 60;
  irb_dataset* ds = nullptr;
  REQUIRE(irb_dataset_synth(&params, &ds) == IRB_OK);

  irb_train_params tp;
  irb_train_params_init(&tp);
  tp.epochs = 3;
  tp.batch_size = 16;
  tp.seed = 5;

  const fs::path trace = tmp.path / "trace.csv";
  irb_model* original = nullptr;
  REQUIRE(irb_train(ds, &tp, trace.string().c_str(), &original) == IRB_OK);
  CHECK(slurp(trace).rfind("epoch,", 0) == 0);

  tp.beta = 1.0;
  irb_model* debiased = nullptr;
  REQUIRE(irb_train(ds, &tp, nullptr, &debiased) == IRB_OK);

  irb_analysis* analysis = nullptr;
  REQUIRE(irb_analyze(ds, original, debiased, IRB_REVERSE_MEAN, 0,
                      &analysis) == IRB_OK);
  double value = -1;
  REQUIRE(irb_analysis_value(analysis, "dispersion", &value) == IRB_OK);
  CHECK(value >= -1.0);
  CHECK(value <= 1.0);
  REQUIRE(irb_analysis_value(analysis, "oracle_alignment", &value) == IRB_OK);
  CHECK(value >= 0.0);  // watermark available
  CHECK(irb_analysis_value(analysis, "nonsense", &value) ==
        IRB_ERR_ITEM_NOT_FOUND);

  const fs::path adir = tmp.path / "analysis";
  REQUIRE(irb_analysis_write(analysis, "{\"mode\":\"mean\"}",
                             adir.string().c_str()) == IRB_OK);
  CHECK(fs::exists(adir / "analysis.json"));
  CHECK(fs::exists(adir / "projection.csv"));
  irb_analysis_free(analysis);

  const double betas[2] = {0.0, 1.0};
  irb_sweep* sweep = nullptr;
  REQUIRE(irb_sweep_beta(ds, &tp, betas, 2, 2,
                         (tmp.path / "dists").string().c_str(),
                         &sweep) == IRB_OK);
  REQUIRE(irb_sweep_rows(sweep) == 2);
  double beta0 = -1;
  REQUIRE(irb_sweep_value(sweep, 0, "beta", &beta0) == IRB_OK);
  CHECK(beta0 == 0.0);
  double delta = 0;
  REQUIRE(irb_sweep_value(sweep, 1, "delta_ndcg1", &delta) == IRB_OK);
  const fs::path sweep_csv = tmp.path / "sweep.csv";
  REQUIRE(irb_sweep_write_csv(sweep, sweep_csv.string().c_str()) == IRB_OK);
  CHECK(slurp(sweep_csv).rfind("beta,delta_ndcg1", 0) == 0);
  const fs::path sweep_json = tmp.path / "sweep.json";
  REQUIRE(irb_sweep_write_json(sweep, nullptr, sweep_json.string().c_str()) ==
          IRB_OK);
  CHECK(slurp(sweep_json).find("\"columns\"") != std::string::npos);
  irb_sweep_free(sweep);

  irb_model_free(original);
  irb_model_free(debiased);
  irb_dataset_free(ds);
}
