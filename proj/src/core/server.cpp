#include "core/server.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "core/error.hpp"
#include "core/unicode.hpp"

namespace medroute {

RouteService::RouteService(Checkpoint ckpt) : ckpt_(std::move(ckpt)) {}

RouteResponse RouteService::classify(const std::string& text, int k,
                                     double threshold) const {
  std::string normalized = unicode::normalize_text(text);
  require(!normalized.empty(), ErrorKind::InvalidArgument,
          "text is empty after normalization");
  require(k >= 1 && k <= ckpt_.codec.num_classes(),
          ErrorKind::InvalidArgument, "k must be in [1, n_classes]");
  require(threshold >= 0.0 && threshold <= 1.0, ErrorKind::InvalidArgument,
          "threshold must be in [0,1]");

  TokenSequence seq = encode_sequence(ckpt_.vocab, normalized,
                                      ckpt_.model_config.max_len);
  auto ranked = predict_topk(ckpt_.params, ckpt_.model_config, seq, k);

  RouteResponse resp;
  resp.model_version = ckpt_.version_id;
  for (const auto& sc : ranked)
    resp.predictions.push_back(
        {ckpt_.codec.decode(sc.class_id), sc.probability, sc.class_id});
  resp.uncertain = resp.predictions[0].probability < threshold;
  return resp;
}

namespace {

nlohmann::json response_json(const RouteResponse& resp) {
  nlohmann::json j;
  j["predictions"] = nlohmann::json::array();
  for (const auto& p : resp.predictions)
    j["predictions"].push_back(
        {{"label", p.label}, {"prob", p.probability}, {"id", p.class_id}});
  j["uncertain"] = resp.uncertain;
  j["model_version"] = resp.model_version;
  return j;
}

}  // namespace

std::string RouteService::classify_json(const std::string& text, int k,
                                        double threshold) const {
  return response_json(classify(text, k, threshold)).dump();
}

struct HttpServer::Impl {
  httplib::Server server;
  std::shared_ptr<const RouteService> service;
  std::mutex service_mu;
  double threshold;
  int default_k;
  std::thread worker;

  std::shared_ptr<const RouteService> get_service() {
    std::lock_guard lock(service_mu);
    return service;
  }
};

HttpServer::HttpServer(std::shared_ptr<const RouteService> service,
                       double threshold, int default_k)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  impl_->threshold = threshold;
  impl_->default_k = default_k;

  impl_->server.set_payload_max_length(64 * 1024);

  impl_->server.Get("/health", [this](const httplib::Request&,
                                      httplib::Response& res) {
    auto svc = impl_->get_service();
    nlohmann::json j;
    if (!svc) {
      j["status"] = "loading";
      res.status = 503;
    } else {
      j["status"] = "ok";
      j["model_version"] = svc->model_version();
    }
    res.set_content(j.dump(), "application/json");
  });

  impl_->server.Post("/classify", [this](const httplib::Request& req,
                                         httplib::Response& res) {
    auto svc = impl_->get_service();
    nlohmann::json out;
    if (!svc) {
      res.status = 503;
      out["error"] = "model not loaded";
      res.set_content(out.dump(), "application/json");
      return;
    }
    try {
      nlohmann::json body = nlohmann::json::parse(req.body);
      std::string text = body.at("text").get<std::string>();
      int k = body.value("k", impl_->default_k);
      k = std::min(k, svc->num_classes());
      RouteResponse r = svc->classify(text, k, impl_->threshold);
      res.set_content(response_json(r).dump(), "application/json");
    } catch (const nlohmann::json::exception& e) {
      res.status = 400;
      out["error"] = std::string("invalid request: ") + e.what();
      res.set_content(out.dump(), "application/json");
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) {
        res.status = 400;
        out["error"] = e.what();
      } else {
        res.status = 500;
        out["error"] = "internal error";
      }
      res.set_content(out.dump(), "application/json");
    }
  });
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::run(const std::string& host, int port) {
  require(impl_->server.listen(host, port) || impl_->server.is_running(),
          ErrorKind::Network,
          "cannot listen on " + host + ":" + std::to_string(port));
}

int HttpServer::start_async(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    require(bound > 0, ErrorKind::Network, "cannot bind server port");
  } else {
    require(impl_->server.bind_to_port(host, port), ErrorKind::Network,
            "cannot bind port " + std::to_string(port));
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

void HttpServer::set_service(std::shared_ptr<const RouteService> service) {
  std::lock_guard lock(impl_->service_mu);
  impl_->service = std::move(service);
}

}  // namespace medroute
