/*
 * Copyright 2026 The Scenic Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// JSON-over-HTTP front end. `Service::Handle` is transport free so tests can
// drive every route without a socket; `Serve` binds it to cpp-httplib.
#ifndef SCENIC_SERVER_HPP_
#define SCENIC_SERVER_HPP_

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "scenic/dataset.hpp"

namespace scenic {

struct ServiceConfig {
  // When set, registered paths must resolve inside this directory.
  std::optional<std::string> dataset_dir;
  std::size_t max_rows = 2000000;
  std::size_t max_solver_calls = 50000;
  std::size_t max_body_bytes = 16u << 20;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

class Service {
 public:
  explicit Service(ServiceConfig config = {});
  ~Service();

  HttpResponse Handle(std::string_view method, std::string_view path,
                      std::string_view body);

  // Registers an in-memory dataset and returns its id. Registering the same
  // content twice yields the same id.
  std::string Register(Dataset ds);

  // Blocks until Stop(). Returns false when the port cannot be bound.
  bool Serve(const std::string& host, int port);
  // Binds to a free port and returns it; pair with ListenAfterBind().
  int BindAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();

  const ServiceConfig& config() const { return config_; }

 private:
  struct Server;

  std::shared_ptr<const Dataset> Find(const std::string& id) const;

  ServiceConfig config_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::unique_ptr<Server> server_;
};

}  // namespace scenic

#endif  // SCENIC_SERVER_HPP_
