// bayeslab-server: HTTP/JSON front end for activity sessions.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "bayeslab/api_service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bayesian updating session service"};
  std::string addr = "127.0.0.1:8787";
  std::string data_dir = "bayeslab-data";
  std::size_t grid_points = bayeslab::kDefaultGridPoints;
  std::string cors_origin = "*";
  app.add_option("--addr", addr, "Listen address host:port")->envname("BAYES_ADDR")->capture_default_str();
  app.add_option("--data-dir", data_dir, "Session storage directory")->envname("BAYES_DATA_DIR")->capture_default_str();
  app.add_option("--grid-points", grid_points, "Default plot grid size")
      ->envname("BAYES_GRID_POINTS")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  app.add_option("--cors-origin", cors_origin, "Allowed CORS origin (empty disables)")
      ->envname("BAYES_CORS_ORIGIN")
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  bayeslab::api::ServiceConfig config;
  try {
    config.set_address(addr);
  } catch (const bayeslab::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  config.data_dir = data_dir;
  config.grid_points = grid_points;
  config.cors_origin = cors_origin;

  bayeslab::api::ApiService service(config);
  httplib::Server server;
  service.mount(server);
  std::cout << "listening on " << config.host << ':' << config.port << ", data in " << config.data_dir << std::endl;
  if (!server.listen(config.host, config.port)) {
    std::cerr << "error: cannot listen on " << addr << '\n';
    return 1;
  }
  return 0;
}
