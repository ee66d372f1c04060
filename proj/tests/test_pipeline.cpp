#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "support/fixtures.hpp"
#include "urbanforge/completion.hpp"
#include "urbanforge/config.hpp"
#include "urbanforge/pipeline.hpp"
#include "urbanforge/serialization.hpp"

using namespace urbanforge;
using urbanforge::testing::TempDir;
using urbanforge::testing::write_acceptance_fixture;

namespace fs = std::filesystem;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

// Sets (or clears, for nullptr) one environment variable and restores the
// previous state on destruction.
struct EnvGuard {
  std::string name;
  std::optional<std::string> saved;

  EnvGuard(const char* variable, const char* value) : name(variable) {
    if (const char* old = std::getenv(variable)) saved = old;
    if (value != nullptr) {
      ::setenv(variable, value, 1);
    } else {
      ::unsetenv(variable);
    }
  }
  ~EnvGuard() {
    if (saved) {
      ::setenv(name.c_str(), saved->c_str(), 1);
    } else {
      ::unsetenv(name.c_str());
    }
  }
  EnvGuard(const EnvGuard&) = delete;
  EnvGuard& operator=(const EnvGuard&) = delete;
};

// In-process HTTP server on a kernel-assigned loopback port. Handlers must be
// registered before start().
struct LoopbackServer {
  httplib::Server server;
  int port = 0;
  std::thread worker;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    worker = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LoopbackServer() {
    server.stop();
    if (worker.joinable()) worker.join();
  }

  std::string endpoint(const std::string& path = "/v1/chat/completions") const {
    return "http://127.0.0.1:" + std::to_string(port) + path;
  }
};

// Grabs a port the kernel just handed out and releases it, so connecting
// there fails fast with a refusal.
int reserve_free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  socklen_t len = sizeof(addr);
  REQUIRE(::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
  ::close(fd);
  return ntohs(addr.sin_port);
}

PipelineConfig fixture_config(const TempDir& dir) {
  auto cfg = load_pipeline_config(write_acceptance_fixture(dir.path));
  REQUIRE(cfg.ok());
  return std::move(cfg).value();
}

std::string artifact_path(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

// Runs ingest and optimize quietly; returns the stage-2 layout path.
std::string prepare_stage2(const PipelineConfig& cfg) {
  std::ostringstream out, err;
  REQUIRE(cmd_ingest(cfg, out, err) == 0);
  REQUIRE(cmd_optimize(cfg, artifact_path(cfg, artifact::kInventory), out, err) == 0);
  return artifact_path(cfg, artifact::kStage2Layout);
}

LandUseType role_of(const CityLayout& layout, const std::string& id) {
  const std::size_t index = layout.index_of(id);
  REQUIRE(index != CityLayout::npos);
  return layout.role_at(index);
}

std::string slurp(const std::string& path) {
  auto text = read_text_file(path);
  REQUIRE(text.ok());
  return std::move(text).value();
}

}  // namespace

TEST_CASE("exit codes separate transport failures from everything else") {
  CHECK(exit_code_for(Errc::kServiceUnavailable) == 3);
  CHECK(exit_code_for(Errc::kInvalidConfig) == 2);
  CHECK(exit_code_for(Errc::kParseError) == 2);
  CHECK(exit_code_for(Errc::kIoError) == 2);
  CHECK(exit_code_for(Errc::kUnknownRegion) == 2);
}

TEST_CASE("completion option validation") {
  CompletionOptions options;
  options.endpoint = "http://host:1234/v1/chat/completions";
  options.model = "planner-x";
  CHECK(validate_completion_options(options).ok());

  CompletionOptions bad = options;
  bad.endpoint.clear();
  auto st = validate_completion_options(bad);
  CHECK(st.error().code == Errc::kInvalidConfig);
  CHECK(st.error().message == "completion endpoint is empty");

  bad = options;
  bad.endpoint = "host:1234";
  CHECK(validate_completion_options(bad).error().message ==
        "completion endpoint must be a full URL");

  bad = options;
  bad.model.clear();
  CHECK(validate_completion_options(bad).error().message == "completion model id is empty");

  bad = options;
  bad.timeout_seconds = 0;
  CHECK(validate_completion_options(bad).error().message == "completion timeout must be positive");

  bad = options;
  bad.max_retries = -1;
  CHECK(validate_completion_options(bad).error().message ==
        "completion retry count must be >= 0");
}

TEST_CASE("completion options come from the environment") {
  SUBCASE("missing endpoint") {
    EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", nullptr);
    EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
    EnvGuard model("URBANFORGE_LLM_MODEL", nullptr);
    auto options = completion_options_from_env();
    REQUIRE_FALSE(options.ok());
    CHECK(options.error().code == Errc::kInvalidConfig);
    CHECK(options.error().message == "URBANFORGE_LLM_ENDPOINT is not set");
  }
  SUBCASE("missing model") {
    EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", "http://127.0.0.1:1/v1/chat/completions");
    EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
    EnvGuard model("URBANFORGE_LLM_MODEL", nullptr);
    auto options = completion_options_from_env();
    REQUIRE_FALSE(options.ok());
    CHECK(options.error().message == "URBANFORGE_LLM_MODEL is not set");
  }
  SUBCASE("fully specified") {
    EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", "http://127.0.0.1:1/v1/chat/completions");
    EnvGuard key("URBANFORGE_LLM_KEY", "token-123");
    EnvGuard model("URBANFORGE_LLM_MODEL", "planner-x");
    auto options = completion_options_from_env();
    REQUIRE(options.ok());
    CHECK(options.value().endpoint == "http://127.0.0.1:1/v1/chat/completions");
    CHECK(options.value().api_key == "token-123");
    CHECK(options.value().model == "planner-x");
    CHECK(options.value().timeout_seconds == 30);
    CHECK(options.value().max_retries == 2);
  }
  SUBCASE("endpoint without a scheme fails validation") {
    EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", "127.0.0.1:9");
    EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
    EnvGuard model("URBANFORGE_LLM_MODEL", "planner-x");
    auto options = completion_options_from_env();
    REQUIRE_FALSE(options.ok());
    CHECK(options.error().message == "completion endpoint must be a full URL");
  }
}

TEST_CASE("the http client round-trips a chat completion") {
  LoopbackServer srv;
  std::mutex mu;
  std::string body_text, auth, request_path;
  bool saw_auth_header = false;
  srv.server.Post("/v1/chat/completions",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    std::lock_guard<std::mutex> lock(mu);
                    body_text = req.body;
                    saw_auth_header = req.has_header("Authorization");
                    auth = req.get_header_value("Authorization");
                    request_path = req.path;
                    res.set_content(R"({"choices":[{"message":{"content":"the reply"}}]})",
                                    "application/json");
                  });
  srv.start();

  CompletionOptions options;
  options.endpoint = srv.endpoint();
  options.api_key = "sekret";
  options.model = "planner-x";
  HttpCompletionClient client(options);
  CHECK(client.max_retries() == 2);

  std::vector<ChatMessage> messages{{"system", "be terse"}, {"user", "plan the town"}};
  auto reply = client.complete(messages);
  REQUIRE(reply.ok());
  CHECK(reply.value() == "the reply");

  std::lock_guard<std::mutex> lock(mu);
  CHECK(request_path == "/v1/chat/completions");
  CHECK(saw_auth_header);
  CHECK(auth == "Bearer sekret");
  auto body = nlohmann::json::parse(body_text);
  CHECK(body.at("model") == "planner-x");
  CHECK(body.at("temperature") == 0);
  REQUIRE(body.at("messages").size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][0]["content"] == "be terse");
  CHECK(body["messages"][1]["role"] == "user");
  CHECK(body["messages"][1]["content"] == "plan the town");
}

TEST_CASE("a bare endpoint gets the default completions path and the key stays optional") {
  LoopbackServer srv;
  std::mutex mu;
  std::string request_path;
  bool saw_auth_header = true;
  srv.server.Post("/v1/chat/completions",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    std::lock_guard<std::mutex> lock(mu);
                    request_path = req.path;
                    saw_auth_header = req.has_header("Authorization");
                    res.set_content(R"({"content":"plain style"})", "application/json");
                  });
  srv.start();

  CompletionOptions options;
  options.endpoint = "http://127.0.0.1:" + std::to_string(srv.port);
  options.model = "planner-x";
  HttpCompletionClient client(options);
  std::vector<ChatMessage> messages{{"user", "hi"}};
  auto reply = client.complete(messages);
  REQUIRE(reply.ok());
  // also covers the plain {"content": ...} reply shape
  CHECK(reply.value() == "plain style");

  std::lock_guard<std::mutex> lock(mu);
  CHECK(request_path == "/v1/chat/completions");
  CHECK_FALSE(saw_auth_header);
}

TEST_CASE("http failures map to the right error codes") {
  CompletionOptions options;
  options.model = "planner-x";
  std::vector<ChatMessage> messages{{"user", "hi"}};

  SUBCASE("non-200 status") {
    LoopbackServer srv;
    srv.server.Post("/v1/chat/completions",
                    [](const httplib::Request&, httplib::Response& res) {
                      res.status = 503;
                      res.set_content("overloaded", "text/plain");
                    });
    srv.start();
    options.endpoint = srv.endpoint();
    HttpCompletionClient client(options);
    auto reply = client.complete(messages);
    REQUIRE_FALSE(reply.ok());
    CHECK(reply.error().code == Errc::kServiceUnavailable);
    CHECK(reply.error().message == "completion service returned status 503");
  }
  SUBCASE("reply is not json") {
    LoopbackServer srv;
    srv.server.Post("/v1/chat/completions",
                    [](const httplib::Request&, httplib::Response& res) {
                      res.set_content("<html>oops</html>", "text/html");
                    });
    srv.start();
    options.endpoint = srv.endpoint();
    HttpCompletionClient client(options);
    auto reply = client.complete(messages);
    REQUIRE_FALSE(reply.ok());
    CHECK(reply.error().code == Errc::kParseError);
    CHECK(reply.error().message == "completion response is not valid JSON");
  }
  SUBCASE("reply carries no choices") {
    LoopbackServer srv;
    srv.server.Post("/v1/chat/completions",
                    [](const httplib::Request&, httplib::Response& res) {
                      res.set_content(R"({"choices":[]})", "application/json");
                    });
    srv.start();
    options.endpoint = srv.endpoint();
    HttpCompletionClient client(options);
    auto reply = client.complete(messages);
    REQUIRE_FALSE(reply.ok());
    CHECK(reply.error().code == Errc::kParseError);
    CHECK(reply.error().message == "completion response carries no message content");
  }
  SUBCASE("message without a content field") {
    LoopbackServer srv;
    srv.server.Post("/v1/chat/completions",
                    [](const httplib::Request&, httplib::Response& res) {
                      res.set_content(R"({"choices":[{"message":{"role":"assistant"}}]})",
                                      "application/json");
                    });
    srv.start();
    options.endpoint = srv.endpoint();
    HttpCompletionClient client(options);
    auto reply = client.complete(messages);
    REQUIRE_FALSE(reply.ok());
    CHECK(reply.error().message == "completion response carries no message content");
  }
  SUBCASE("connection refused") {
    options.endpoint = "http://127.0.0.1:" + std::to_string(reserve_free_port());
    options.timeout_seconds = 2;
    HttpCompletionClient client(options);
    auto reply = client.complete(messages);
    REQUIRE_FALSE(reply.ok());
    CHECK(reply.error().code == Errc::kServiceUnavailable);
    CHECK(reply.error().message.rfind("completion request to", 0) == 0);
  }
  SUBCASE("invalid options never touch the network") {
    options.endpoint.clear();
    HttpCompletionClient client(options);
    auto reply = client.complete(messages);
    REQUIRE_FALSE(reply.ok());
    CHECK(reply.error().code == Errc::kInvalidConfig);
    CHECK(reply.error().message == "completion endpoint is empty");
  }
}

TEST_CASE("ingest writes the inventory and prints the census") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  std::ostringstream out, err;
  REQUIRE(cmd_ingest(cfg, out, err) == 0);
  CHECK(err.str().empty());

  const std::string inventory_path = artifact_path(cfg, artifact::kInventory);
  const std::string expected =
      "Residential 4\n"
      "StateGovtProperty 4\n"
      "Business 3\n"
      "PublicUtilities 0\n"
      "ShopsAndMarket 2\n"
      "Educational 3\n"
      "VacantLand 9\n"
      "ParkAndOpenSpace 2\n"
      "Hospital 0\n"
      "total 27\n"
      "wrote " +
      inventory_path + "\n";
  CHECK(out.str() == expected);

  auto layout = load_layout(inventory_path);
  REQUIRE(layout.ok());
  CHECK(layout.value().regions().size() == 27);

  PipelineConfig broken = cfg;
  broken.map_path.clear();
  std::ostringstream out2, err2;
  CHECK(cmd_ingest(broken, out2, err2) == 2);
  CHECK(err2.str() == "InvalidConfig: no map image configured\n");
}

TEST_CASE("evaluate appends metric rows and prints the table") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  std::ostringstream sink, errs;
  REQUIRE(cmd_ingest(cfg, sink, errs) == 0);
  const std::string inventory_path = artifact_path(cfg, artifact::kInventory);

  std::ostringstream table, err;
  REQUIRE(cmd_evaluate(cfg, inventory_path, "stage1", table, err) == 0);
  const std::string expected_table = std::string("Metric") + std::string(14, ' ') +
                                     "stage1\n"
                                     "Service" +
                                     std::string(14, ' ') +
                                     "0.200\n"
                                     "Ecology" +
                                     std::string(14, ' ') +
                                     "0.000\n"
                                     "Satisfaction" +
                                     std::string(9, ' ') + "0.646\n";
  CHECK(table.str() == expected_table);

  const std::string csv_path = artifact_path(cfg, artifact::kMetricsCsv);
  CHECK(slurp(csv_path) ==
        "stage,service,ecology,satisfaction\n"
        "stage1,0.200,0.000,0.646\n");

  std::ostringstream again, err2;
  REQUIRE(cmd_evaluate(cfg, inventory_path, "recheck", again, err2) == 0);
  CHECK(slurp(csv_path) ==
        "stage,service,ecology,satisfaction\n"
        "stage1,0.200,0.000,0.646\n"
        "recheck,0.200,0.000,0.646\n");

  std::ostringstream out3, err3;
  CHECK(cmd_evaluate(cfg, dir.file("nope.json"), "x", out3, err3) == 2);
  CHECK(err3.str().rfind("IoError: cannot open", 0) == 0);
}

TEST_CASE("optimize claims the vacant quarter and records the trace") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  std::ostringstream sink, errs;
  REQUIRE(cmd_ingest(cfg, sink, errs) == 0);
  const std::string inventory_path = artifact_path(cfg, artifact::kInventory);

  std::ostringstream out, err;
  REQUIRE(cmd_optimize(cfg, inventory_path, out, err) == 0);
  const std::string stage2_path = artifact_path(cfg, artifact::kStage2Layout);
  CHECK(out.str() ==
        "greedy claims 5\n"
        "generations 50\n"
        "best fitness 0.900000\n"
        "wrote " +
            stage2_path + "\n");

  // the best member is the greedy layout itself: claims land in round-robin
  // player order, nearest-return first
  auto layout = load_layout(stage2_path);
  REQUIRE(layout.ok());
  CHECK(role_of(layout.value(), "vacant_land-000") == LandUseType::kEducational);
  CHECK(role_of(layout.value(), "vacant_land-001") == LandUseType::kBusiness);
  CHECK(role_of(layout.value(), "vacant_land-002") == LandUseType::kShopsAndMarket);
  CHECK(role_of(layout.value(), "vacant_land-004") == LandUseType::kParkAndOpenSpace);
  CHECK(role_of(layout.value(), "vacant_land-005") == LandUseType::kParkAndOpenSpace);
  CHECK(role_of(layout.value(), "vacant_land-003") == LandUseType::kVacantLand);
  CHECK(role_of(layout.value(), "vacant_land-008") == LandUseType::kVacantLand);

  const auto trace = split_lines(slurp(artifact_path(cfg, artifact::kTrace)));
  REQUIRE(trace.size() == 52);  // header + generations 0..50
  CHECK(trace[0] == "generation,best,mean");
  CHECK(trace[1].rfind("0,0.90000000000000002,", 0) == 0);
  CHECK(trace[51].rfind("50,0.90000000000000002,", 0) == 0);

  std::ostringstream out2, err2;
  CHECK(cmd_optimize(cfg, dir.file("missing.json"), out2, err2) == 2);
  CHECK(err2.str().rfind("IoError: cannot open", 0) == 0);
}

TEST_CASE("planning applies the winning proposal and logs every decision") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  const std::string stage2_path = prepare_stage2(cfg);

  std::ostringstream out, err;
  REQUIRE(cmd_plan(cfg, stage2_path, OnLlmError::kFail, out, err) == 0);
  const std::string stage3_path = artifact_path(cfg, artifact::kStage3Layout);
  CHECK(out.str() ==
        "decisions 4, accepted 1\n"
        "satisfaction 0.708 -> 0.833\n"
        "wrote " +
            stage3_path + "\n");

  auto layout = load_layout(stage3_path);
  REQUIRE(layout.ok());
  CHECK(role_of(layout.value(), "vacant_land-007") == LandUseType::kHospital);
  CHECK(role_of(layout.value(), "vacant_land-003") == LandUseType::kVacantLand);
  CHECK(role_of(layout.value(), "vacant_land-006") == LandUseType::kVacantLand);
  CHECK(role_of(layout.value(), "vacant_land-008") == LandUseType::kVacantLand);

  // one decision per proposed action, in demographic processing order
  const auto lines = split_lines(slurp(artifact_path(cfg, artifact::kDecisionLog)));
  REQUIRE(lines.size() == 4);
  std::vector<nlohmann::json> log;
  for (const std::string& line : lines) log.push_back(nlohmann::json::parse(line));

  CHECK(log[0]["subregion"] == "educational");
  CHECK(log[0]["action"]["kind"] == "reassign");
  CHECK(log[0]["action"]["target"] == "vacant_land-003");
  CHECK(log[0]["decision"] == "reject");
  CHECK(log[0]["reason"].get<std::string>().rfind("guard: satisfaction delta", 0) == 0);
  CHECK(log[0]["satisfaction_delta"].get<double>() == 0.0);

  CHECK(log[1]["subregion"] == "commercial");
  CHECK(log[1]["action"]["target"] == "vacant_land-006");
  CHECK(log[1]["decision"] == "reject");

  CHECK(log[2]["subregion"] == "residential");
  CHECK(log[2]["action"]["target"] == "vacant_land-007");
  CHECK(log[2]["action"]["new_type"] == "Hospital");
  CHECK(log[2]["decision"] == "accept");
  CHECK(log[2]["reason"] == "applied");
  CHECK(log[2]["satisfaction_delta"].get<double>() == doctest::Approx(0.125).epsilon(1e-9));

  CHECK(log[3]["subregion"] == "residential");
  CHECK(log[3]["action"]["target"] == "vacant_land-008");
  CHECK(log[3]["decision"] == "reject");

  // the report file matches a fresh evaluation of the emitted layouts
  auto reports = nlohmann::json::parse(slurp(artifact_path(cfg, artifact::kPlanReports)));
  REQUIRE(reports.contains("before"));
  REQUIRE(reports.contains("after"));
  CHECK(reports["before"]["stage"] == "before");
  CHECK(reports["after"]["stage"] == "after");

  std::vector<SubRegion> subregions;
  for (const SubRegionSpec& spec : cfg.subregions) {
    auto mask = load_mask_png(spec.mask_path);
    REQUIRE(mask.ok());
    subregions.push_back({spec.id, spec.role, std::move(mask).value()});
  }
  auto stage2 = load_layout(stage2_path);
  REQUIRE(stage2.ok());
  auto before = metrics_report(stage2.value(), cfg.services, subregions, "before");
  REQUIRE(before.ok());
  CHECK(reports["before"]["service"].get<double>() == before.value().service);
  CHECK(reports["before"]["ecology"].get<double>() == before.value().ecology);
  CHECK(reports["before"]["satisfaction"].get<double>() == before.value().satisfaction);

  auto after = metrics_report(layout.value(), cfg.services, subregions, "after");
  REQUIRE(after.ok());
  CHECK(reports["after"]["satisfaction"].get<double>() == after.value().satisfaction);
  CHECK(after.value().service == 1.0);
  CHECK(after.value().ecology == 1.0);

  PipelineConfig truncated = cfg;
  truncated.subregions.resize(1);
  std::ostringstream out2, err2;
  CHECK(cmd_plan(truncated, stage2_path, OnLlmError::kFail, out2, err2) == 2);
  CHECK(err2.str() == "InvalidConfig: planning needs all 4 sub-region masks; config has 1\n");
}

TEST_CASE("the pipeline runs end to end and reruns byte-identically") {
  TempDir dir_a, dir_b;
  PipelineConfig cfg_a = fixture_config(dir_a);
  PipelineConfig cfg_b = fixture_config(dir_b);

  std::ostringstream out_a, err_a;
  REQUIRE(cmd_pipeline(cfg_a, false, OnLlmError::kFail, out_a, err_a) == 0);
  CHECK(err_a.str().empty());
  const std::string text = out_a.str();
  CHECK(contains(text, "total 27\n"));
  CHECK(contains(text, "greedy claims 5\n"));
  CHECK(contains(text, "decisions 4, accepted 1\n"));
  CHECK(contains(text, "satisfaction 0.708 -> 0.833\n"));
  CHECK(text.ends_with("pipeline complete\n"));

  for (const char* name :
       {artifact::kInventory, artifact::kStage1Png, artifact::kMetricsCsv,
        artifact::kStage2Layout, artifact::kTrace, artifact::kStage2Png,
        artifact::kStage3Layout, artifact::kDecisionLog, artifact::kPlanReports,
        artifact::kStage3Png}) {
    INFO("artifact ", name);
    CHECK(fs::exists(fs::path(cfg_a.out_dir) / name));
  }

  const std::string metrics_path = artifact_path(cfg_a, artifact::kMetricsCsv);
  const std::string metrics = slurp(metrics_path);
  CHECK(metrics ==
        "stage,service,ecology,satisfaction\n"
        "stage1,0.200,0.000,0.646\n"
        "stage2,0.800,1.000,0.708\n"
        "stage3,1.000,1.000,0.833\n");

  // a second fixture directory produces the same bytes
  std::ostringstream out_b, err_b;
  REQUIRE(cmd_pipeline(cfg_b, false, OnLlmError::kFail, out_b, err_b) == 0);
  for (const char* name :
       {artifact::kInventory, artifact::kStage2Layout, artifact::kStage3Layout,
        artifact::kTrace, artifact::kMetricsCsv, artifact::kDecisionLog,
        artifact::kPlanReports, artifact::kStage2Png}) {
    INFO("artifact ", name);
    CHECK(slurp(artifact_path(cfg_a, name)) == slurp(artifact_path(cfg_b, name)));
  }

  // rerunning in place starts the metrics file fresh instead of appending
  std::ostringstream out_c, err_c;
  REQUIRE(cmd_pipeline(cfg_a, false, OnLlmError::kFail, out_c, err_c) == 0);
  CHECK(out_c.str() == text);
  CHECK(slurp(metrics_path) == metrics);
}

TEST_CASE("skip-plan stops the pipeline after stage two") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  std::ostringstream out, err;
  REQUIRE(cmd_pipeline(cfg, true, OnLlmError::kFail, out, err) == 0);
  CHECK(out.str().ends_with("pipeline complete (plan skipped)\n"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / artifact::kStage2Png));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / artifact::kStage3Layout));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / artifact::kStage3Png));
  CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / artifact::kDecisionLog));
  CHECK(slurp(artifact_path(cfg, artifact::kMetricsCsv)) ==
        "stage,service,ecology,satisfaction\n"
        "stage1,0.200,0.000,0.646\n"
        "stage2,0.800,1.000,0.708\n");
}

TEST_CASE("the remote backend needs its environment") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  const std::string stage2_path = prepare_stage2(cfg);
  cfg.backend = PlannerBackend::kRemote;

  EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", nullptr);
  EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
  EnvGuard model("URBANFORGE_LLM_MODEL", nullptr);
  std::ostringstream out, err;
  CHECK(cmd_plan(cfg, stage2_path, OnLlmError::kFail, out, err) == 2);
  CHECK(err.str() == "InvalidConfig: URBANFORGE_LLM_ENDPOINT is not set\n");
}

TEST_CASE("an unreachable completion service aborts or falls back by policy") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  const std::string stage2_path = prepare_stage2(cfg);

  const std::string dead_endpoint =
      "http://127.0.0.1:" + std::to_string(reserve_free_port());
  EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", dead_endpoint.c_str());
  EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
  EnvGuard model("URBANFORGE_LLM_MODEL", "planner-x");
  cfg.backend = PlannerBackend::kRemote;

  SUBCASE("abort on transport failure") {
    std::ostringstream out, err;
    CHECK(cmd_plan(cfg, stage2_path, OnLlmError::kFail, out, err) == 3);
    CHECK(err.str().rfind("ServiceUnavailable: completion request to", 0) == 0);
  }
  SUBCASE("fall back to the heuristic planner") {
    PipelineConfig reference = cfg;
    reference.backend = PlannerBackend::kHeuristic;
    reference.out_dir = dir.file("reference");
    std::ostringstream out_ref, err_ref;
    REQUIRE(cmd_plan(reference, stage2_path, OnLlmError::kFail, out_ref, err_ref) == 0);

    std::ostringstream out, err;
    REQUIRE(cmd_plan(cfg, stage2_path, OnLlmError::kHeuristic, out, err) == 0);
    CHECK(count_occurrences(err.str(), "; using the heuristic planner\n") == 4);
    CHECK(contains(err.str(), "warning: completion service unreachable for industrial;"));
    CHECK(out.str().rfind("decisions 4, accepted 1\nsatisfaction 0.708 -> 0.833\n", 0) == 0);

    // identical planning outcome either way
    CHECK(slurp(artifact_path(cfg, artifact::kStage3Layout)) ==
          slurp(artifact_path(reference, artifact::kStage3Layout)));
    CHECK(slurp(artifact_path(cfg, artifact::kDecisionLog)) ==
          slurp(artifact_path(reference, artifact::kDecisionLog)));
  }
}

TEST_CASE("remote planning round-trips proposals over http") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  const std::string stage2_path = prepare_stage2(cfg);

  LoopbackServer srv;
  std::mutex mu;
  std::vector<nlohmann::json> bodies;
  srv.server.Post("/v1/chat/completions",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    {
                      std::lock_guard<std::mutex> lock(mu);
                      bodies.push_back(nlohmann::json::parse(req.body));
                    }
                    nlohmann::json reply;
                    reply["content"] = "{\"actions\": [], \"rationale\": \"stand pat\"}";
                    res.set_content(reply.dump(), "application/json");
                  });
  srv.start();

  const std::string live_endpoint = srv.endpoint();
  EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", live_endpoint.c_str());
  EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
  EnvGuard model("URBANFORGE_LLM_MODEL", "planner-x");
  cfg.backend = PlannerBackend::kRemote;

  std::ostringstream out, err;
  REQUIRE(cmd_plan(cfg, stage2_path, OnLlmError::kFail, out, err) == 0);
  CHECK(out.str().rfind("decisions 0, accepted 0\nsatisfaction 0.708 -> 0.708\n", 0) == 0);

  std::lock_guard<std::mutex> lock(mu);
  REQUIRE(bodies.size() == 4);
  const char* expected_order[] = {"industrial", "educational", "commercial", "residential"};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(bodies[i]["model"] == "planner-x");
    REQUIRE(bodies[i]["messages"].size() == 2);
    const auto prompt = bodies[i]["messages"][1]["content"].get<std::string>();
    CHECK(prompt.rfind(std::string("Sub-region: ") + expected_order[i] + "\n", 0) == 0);
  }
}

TEST_CASE("a planner that keeps replying garbage is skipped with a warning") {
  TempDir dir;
  PipelineConfig cfg = fixture_config(dir);
  const std::string stage2_path = prepare_stage2(cfg);

  LoopbackServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/v1/chat/completions",
                  [&](const httplib::Request&, httplib::Response& res) {
                    ++hits;
                    res.set_content(R"({"content":"not a proposal"})", "application/json");
                  });
  srv.start();

  const std::string live_endpoint = srv.endpoint();
  EnvGuard endpoint("URBANFORGE_LLM_ENDPOINT", live_endpoint.c_str());
  EnvGuard key("URBANFORGE_LLM_KEY", nullptr);
  EnvGuard model("URBANFORGE_LLM_MODEL", "planner-x");
  cfg.backend = PlannerBackend::kRemote;

  std::ostringstream out, err;
  REQUIRE(cmd_plan(cfg, stage2_path, OnLlmError::kFail, out, err) == 0);
  CHECK(out.str().rfind("decisions 0, accepted 0\n", 0) == 0);
  CHECK(count_occurrences(err.str(), "; proceeding with an empty proposal\n") == 4);
  CHECK(contains(err.str(),
                 "warning: planner for sub-region industrial failed: "
                 "proposal is not valid JSON; proceeding with an empty proposal\n"));
  // first ask plus two corrective retries, for each of the four planners
  CHECK(hits.load() == 12);
}
