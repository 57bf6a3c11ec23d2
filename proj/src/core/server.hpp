#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"

namespace medroute {

struct RoutePrediction {
  std::string label;
  double probability = 0.0;
  int class_id = 0;
};

struct RouteResponse {
  std::vector<RoutePrediction> predictions;  // descending probability
  bool uncertain = false;                    // top probability < threshold
  std::string model_version;
};

// Read-only routing facade over a loaded checkpoint; safe for concurrent
// callers.
class RouteService {
 public:
  explicit RouteService(Checkpoint ckpt);

  RouteResponse classify(const std::string& text, int k,
                         double threshold) const;
  std::string classify_json(const std::string& text, int k,
                            double threshold) const;
  const std::string& model_version() const { return ckpt_.version_id; }
  int num_classes() const { return ckpt_.codec.num_classes(); }

 private:
  Checkpoint ckpt_;
};

// HTTP/1.1 JSON service: POST /classify, GET /health.
class HttpServer {
 public:
  HttpServer(std::shared_ptr<const RouteService> service, double threshold,
             int default_k = 5);
  ~HttpServer();

  // Blocks until stop(). Throws Error{Network} if the port is taken.
  void run(const std::string& host, int port);

  // Starts on a background thread and returns the bound port.
  int start_async(const std::string& host, int port = 0);
  void stop();

  // A service-less server answers 503 on /health and /classify; used to
  // model the pre-load window.
  void set_service(std::shared_ptr<const RouteService> service);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace medroute
