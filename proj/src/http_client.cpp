// Copyright 2026 The hardneg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "hardneg/llmgen.hpp"

namespace hardneg::llmgen {

using nlohmann::json;

HttpChatClient::HttpChatClient(std::string endpoint, std::string api_key, int timeout_seconds)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
}

json HttpChatClient::request_body(const ChatRequest& request) {
  return {{"model", request.model},
          {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
          {"temperature", request.temperature}};
}

ChatResponse HttpChatClient::parse_response_body(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("chat completion response is not JSON: ") + e.what());
  }
  ChatResponse out;
  try {
    out.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw TransportError("chat completion response has no choices[0].message.content");
  }
  if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    if (usage->contains("prompt_tokens")) out.prompt_tokens = usage->at("prompt_tokens").get<std::size_t>();
    if (usage->contains("completion_tokens")) out.completion_tokens = usage->at("completion_tokens").get<std::size_t>();
  }
  return out;
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
  // A client per call keeps complete() safe to call from several threads.
  httplib::Client cli(endpoint_);
  cli.set_connection_timeout(timeout_seconds_, 0);
  cli.set_read_timeout(timeout_seconds_, 0);
  cli.set_write_timeout(timeout_seconds_, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = cli.Post("/v1/chat/completions", headers, request_body(request).dump(), "application/json");
  if (!res) throw TransportError("chat completion request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw TransportError("chat completion returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200));
  }
  return parse_response_body(res->body);
}

}  // namespace hardneg::llmgen
