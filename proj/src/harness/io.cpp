/*
 * Copyright 2026 the funnelsel authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "harness/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fsel::harness {

std::vector<Key> read_keys(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("cannot open key file: " + path);
  std::streamoff size = in.tellg();
  if (size % 8 != 0)
    throw std::runtime_error("key file size is not a multiple of 8 bytes: " + path);
  in.seekg(0);
  std::vector<Key> keys(static_cast<std::size_t>(size / 8));
  std::vector<unsigned char> raw(static_cast<std::size_t>(size));
  in.read(reinterpret_cast<char*>(raw.data()), size);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    Key v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | raw[8 * i + static_cast<std::size_t>(b)];
    keys[i] = v;
  }
  return keys;
}

void write_keys(const std::string& path, const std::vector<Key>& keys) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open key file for writing: " + path);
  std::vector<unsigned char> raw(keys.size() * 8);
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (int b = 0; b < 8; ++b)
      raw[8 * i + static_cast<std::size_t>(b)] =
          static_cast<unsigned char>((keys[i] >> (8 * b)) & 0xffu);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

std::vector<rank_t> read_ranks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rank file: " + path);
  std::vector<rank_t> ranks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ranks.push_back(std::stoull(line));
    if (ranks.size() > 1 && ranks[ranks.size() - 2] >= ranks.back())
      throw std::runtime_error("rank file must be strictly increasing: " + path);
  }
  return ranks;
}

void write_ranks(const std::string& path, const std::vector<rank_t>& ranks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open rank file for writing: " + path);
  for (rank_t r : ranks) out << r << '\n';
}

std::vector<rank_t> parse_rank_list(const std::string& text) {
  std::vector<rank_t> ranks;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    ranks.push_back(std::stoull(item));
  }
  return ranks;
}

}  // namespace fsel::harness
