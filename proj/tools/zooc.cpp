// zooc -- command-line front end: run and check composition programs,
// manage the package store, publish services, serve bundles, talk to the
// discovery registry and run the benchmark suite.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zoo/zoo.hpp"

namespace fs = std::filesystem;

namespace {

struct CliConfig {
  std::string store_root = "./zoo-store";
  std::string registry_url;
  std::int64_t ttl_seconds = 600;
  std::string out_root = "./zoo-artifacts";
  std::string log_level = "info";
  bool json = false;
  std::int64_t now = 0;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw zoo::Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Lowest layer of the config precedence: ~/.zooc.json below env vars and
// flags, above built-in defaults.
void load_config_file(CliConfig& cfg) {
  const char* home = std::getenv("HOME");
  if (!home) return;
  fs::path path = fs::path(home) / ".zooc.json";
  if (!fs::exists(path)) return;
  auto j = nlohmann::json::parse(read_text(path.string()), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return;
  cfg.store_root = j.value("store", cfg.store_root);
  cfg.registry_url = j.value("registry", cfg.registry_url);
  cfg.ttl_seconds = j.value("ttl", cfg.ttl_seconds);
  cfg.out_root = j.value("out", cfg.out_root);
  cfg.log_level = j.value("log_level", cfg.log_level);
}

void print_environment(const zoo::dsl::Environment& env, bool as_json) {
  if (as_json) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& name : env.order) {
      const auto& value = env.bindings.at(name);
      nlohmann::json row{{"name", name}};
      if (const auto* svc = std::get_if<zoo::Service>(&value)) {
        row["kind"] = "service";
        row["signature"] = svc->type_string();
      } else if (const auto* dict = std::get_if<zoo::ServiceDict>(&value)) {
        row["kind"] = "dictionary";
        nlohmann::json keys = nlohmann::json::array();
        for (const auto& [k, _] : *dict) keys.push_back(k);
        row["services"] = keys;
      } else {
        row["kind"] = "uri";
        row["uri"] = std::get<std::string>(value);
      }
      out.push_back(row);
    }
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const auto& name : env.order) {
    const auto& value = env.bindings.at(name);
    if (const auto* svc = std::get_if<zoo::Service>(&value)) {
      std::cout << name << " : " << svc->type_string() << "\n";
    } else if (const auto* dict = std::get_if<zoo::ServiceDict>(&value)) {
      std::cout << name << " : dictionary of " << dict->size() << " service"
                << (dict->size() == 1 ? "" : "s") << "\n";
    } else {
      std::cout << name << " = " << std::get<std::string>(value) << "\n";
    }
  }
}

// "gid/vid#name" -> (ref, function name)
std::pair<zoo::VersionRef, std::string> parse_service_ref(
    const std::string& text) {
  auto hash = text.rfind('#');
  if (hash == std::string::npos || hash + 1 == text.size())
    throw zoo::Error("expected <package-ref>#<service-name>, got \"" + text +
                     "\"");
  return {zoo::VersionRef::parse(text.substr(0, hash)), text.substr(hash + 1)};
}

zoo::PackageFiles read_package_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw zoo::Error(dir + " is not a directory");
  zoo::PackageFiles files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file())
      files[entry.path().filename().string()] = read_text(entry.path().string());
  return files;
}

}  // namespace

int main(int argc, char** argv) {
  CliConfig cfg;
  load_config_file(cfg);
  cfg.now = static_cast<std::int64_t>(std::time(nullptr));

  CLI::App app{"zooc - compose typed analytics services and deploy them"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "print help for every subcommand");
  app.add_option("--store", cfg.store_root, "package store root")
      ->envname("ZOOC_STORE")
      ->capture_default_str();
  app.add_option("--registry", cfg.registry_url, "discovery registry URL")
      ->envname("ZOOC_REGISTRY");
  app.add_option("--ttl", cfg.ttl_seconds, "latest-version cache TTL, seconds")
      ->envname("ZOOC_TTL")
      ->capture_default_str();
  app.add_option("--out", cfg.out_root, "artifact output directory")
      ->capture_default_str();
  app.add_option("--log-level", cfg.log_level, "quiet|info|debug")
      ->capture_default_str();
  app.add_flag("--json", cfg.json, "machine-readable output");
  app.add_option("--now", cfg.now, "override the clock (epoch seconds)")
      ->group("");  // hidden; for reproducible runs

  std::string file, ref_text, backend_name = "container", target, dir;
  std::string description, suite = "all", csv_out = "results.csv", plot_out;
  std::string input_tok, output_tok, query_text, gid, data_file = "registry.jsonl";
  int port = 8080;
  bool do_register = false, raw_package = false;

  auto* cmd_run = app.add_subcommand("run", "evaluate a composition program");
  cmd_run->add_option("file", file, "program file")->required();

  auto* cmd_check = app.add_subcommand(
      "check", "parse and type-check a program without publishing");
  cmd_check->add_option("file", file, "program file")->required();

  auto* cmd_publish =
      app.add_subcommand("publish", "publish one service from a package");
  cmd_publish->add_option("service", ref_text, "<package-ref>#<service-name>")
      ->required();
  cmd_publish->add_option("--backend", backend_name,
                          "container|script|unikernel")
      ->required();
  cmd_publish->add_option("--target", target, "image tag or output path")
      ->required();
  cmd_publish->add_flag("--register", do_register,
                        "add the published service to the discovery registry");
  cmd_publish->add_option("--description", description,
                          "one-line description for the registry record");

  auto* cmd_serve_bundle =
      app.add_subcommand("serve-bundle", "serve a .zoosvc script bundle");
  cmd_serve_bundle->add_option("file", file, "bundle file")->required();
  cmd_serve_bundle->add_option("--port", port, "listen port")
      ->capture_default_str();

  auto* cmd_serve =
      app.add_subcommand("serve", "serve a container bundle directory");
  cmd_serve->add_option("path", dir, "bundle directory or .zoosvc file")
      ->required();
  cmd_serve->add_option("--port", port, "listen port")->capture_default_str();

  auto* cmd_registry =
      app.add_subcommand("registry", "start the discovery registry server");
  cmd_registry->add_option("--port", port, "listen port")->capture_default_str();
  cmd_registry->add_option("--data", data_file, "append-log file")
      ->capture_default_str();

  auto* cmd_discover =
      app.add_subcommand("discover", "search the discovery registry");
  cmd_discover->add_option("--input", input_tok, "input type token");
  cmd_discover->add_option("--output", output_tok, "output type token");
  cmd_discover->add_option("--q", query_text, "description substring");

  auto* cmd_bench = app.add_subcommand("bench", "run the benchmark suite");
  cmd_bench->add_option("--suite", suite, "all or comma-separated workloads")
      ->capture_default_str();
  cmd_bench->add_option("--out", csv_out, "CSV output file")
      ->capture_default_str();
  cmd_bench->add_option("--plot", plot_out, "write a log-log SVG chart");

  auto* cmd_pkg = app.add_subcommand("pkg", "package store operations");
  cmd_pkg->require_subcommand(1);
  auto* cmd_pkg_publish =
      cmd_pkg->add_subcommand("publish", "publish a directory as a package");
  cmd_pkg_publish->add_option("dir", dir, "directory of package files")
      ->required();
  cmd_pkg_publish->add_option("--gid", gid, "fix the package id");
  cmd_pkg_publish->add_flag("--raw", raw_package,
                            "allow packages without zoo.json");
  auto* cmd_pkg_resolve =
      cmd_pkg->add_subcommand("resolve", "resolve a reference to a version");
  cmd_pkg_resolve->add_option("ref", ref_text, "gid[/vid|/latest][/pin]")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run 'zooc --help' for usage\n";
    return 2;
  }

  try {
    zoo::PackageStore store(cfg.store_root, nullptr, cfg.ttl_seconds);

    if (*cmd_run || *cmd_check) {
      bool dry_run = static_cast<bool>(*cmd_check);
      auto program = zoo::dsl::parse(read_text(file));
      zoo::StorePublisher publisher(store, cfg.out_root, cfg.now, dry_run);
      zoo::dsl::Evaluator evaluator(store, publisher, cfg.now);
      auto env = evaluator.eval(program);
      if (dry_run) {
        if (cfg.json)
          std::cout << nlohmann::json{{"ok", true},
                                      {"statements", program.size()}}
                           .dump()
                    << "\n";
        else
          std::cout << "ok: " << program.size() << " statements, "
                    << publisher.published().size()
                    << " deployments validated\n";
      } else {
        print_environment(env, cfg.json);
      }
      return 0;
    }

    if (*cmd_publish) {
      auto [ref, name] = parse_service_ref(ref_text);
      auto dict = zoo::create_service(ref, store, cfg.now);
      auto it = dict.find(name);
      if (it == dict.end()) throw zoo::KeyNotFoundError(name);
      zoo::BackendSpec spec{zoo::backend_from_name(backend_name), target};
      zoo::Artifact artifact = zoo::publish_service(
          it->second, spec, store, cfg.out_root, cfg.now);

      std::int64_t record_id = 0;
      if (do_register) {
        if (cfg.registry_url.empty())
          throw zoo::Error("--register needs --registry (or ZOOC_REGISTRY)");
        zoo::DiscoveryRecord rec;
        rec.gist_id = ref.gid;
        rec.description = description;
        rec.type_string = it->second.type_string();
        rec.uri = artifact.uri;
        rec.published_at = cfg.now;
        record_id = zoo::DiscoveryClient(cfg.registry_url).register_record(rec);
      }

      if (cfg.json) {
        nlohmann::json j{{"uri", artifact.uri},
                         {"path", artifact.output_path.string()}};
        if (record_id) j["record_id"] = record_id;
        std::cout << j.dump() << "\n";
      } else {
        std::cout << artifact.uri << "\n";
        if (record_id) std::cout << "registered as record " << record_id << "\n";
      }
      return 0;
    }

    if (*cmd_serve_bundle || *cmd_serve) {
      std::string path = *cmd_serve_bundle ? file : dir;
      zoo::BundleManifest bundle = fs::is_directory(path)
                                       ? zoo::load_container_bundle(path)
                                       : zoo::load_bundle(path);
      auto registry = zoo::default_registry();
      zoo::ServiceServer server(bundle.service, registry);
      int actual = server.start(port);
      std::cout << "serving " << bundle.service.name << " ("
                << bundle.service.type_string() << ") on port " << actual
                << "\n";
      server.wait();
      return 0;
    }

    if (*cmd_registry) {
      zoo::ServiceRegistry registry(data_file);
      zoo::RegistryServer server(registry, cfg.now);
      int actual = server.start(port);
      std::cout << "registry listening on port " << actual << " ("
                << registry.size() << " records)\n";
      server.wait();
      return 0;
    }

    if (*cmd_discover) {
      if (cfg.registry_url.empty())
        throw zoo::Error("discover needs --registry (or ZOOC_REGISTRY)");
      auto opt = [](const std::string& s) {
        return s.empty() ? std::nullopt : std::optional<std::string>(s);
      };
      auto records = zoo::DiscoveryClient(cfg.registry_url)
                         .search(opt(input_tok), opt(output_tok), opt(query_text));
      if (cfg.json) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : records) out.push_back(r.to_json());
        std::cout << out.dump(2) << "\n";
      } else {
        for (const auto& r : records)
          std::cout << "[" << r.id << "] gist=" << r.gist_id << " type=\""
                    << r.type_string << "\" uri=" << r.uri << " desc=\""
                    << r.description << "\"\n";
        if (records.empty()) std::cout << "no matching records\n";
      }
      return 0;
    }

    if (*cmd_bench) {
      zoo::bench::BenchConfig config;
      if (suite == "all") {
        config.workloads = zoo::bench::known_workloads();
      } else {
        std::stringstream ss(suite);
        std::string item;
        while (std::getline(ss, item, ','))
          if (!item.empty()) config.workloads.push_back(item);
      }
      auto results = zoo::bench::run_suite(config);
      std::string csv = zoo::bench::results_csv(results);
      zoo::bench::write_text_file(csv_out, csv);
      if (!plot_out.empty())
        zoo::bench::write_text_file(plot_out, zoo::bench::plot_svg(results));
      std::cout << csv;
      if (cfg.log_level != "quiet")
        std::cerr << "wrote " << csv_out
                  << (plot_out.empty() ? "" : " and " + plot_out) << "\n";
      return 0;
    }

    if (*cmd_pkg_publish) {
      auto files = read_package_dir(dir);
      auto ref = store.publish_package(
          files, gid.empty() ? std::nullopt : std::optional(gid), !raw_package,
          cfg.now);
      if (cfg.json)
        std::cout << nlohmann::json{{"ref", ref.str()}}.dump() << "\n";
      else
        std::cout << ref.str() << "\n";
      return 0;
    }

    if (*cmd_pkg_resolve) {
      auto manifest = store.resolve(zoo::VersionRef::parse(ref_text), cfg.now);
      if (cfg.json) {
        nlohmann::json files = nlohmann::json::object();
        for (const auto& [name, bytes] : manifest.files)
          files[name] = bytes.size();
        std::cout << nlohmann::json{{"gid", manifest.gid},
                                    {"vid", manifest.vid},
                                    {"files", files}}
                         .dump()
                  << "\n";
      } else {
        std::cout << manifest.gid << "/" << manifest.vid << "\n";
        for (const auto& [name, bytes] : manifest.files)
          std::cout << "  " << name << " (" << bytes.size() << " bytes)\n";
      }
      return 0;
    }

    std::cerr << "no subcommand given; run 'zooc --help'\n";
    return 2;
  } catch (const zoo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
