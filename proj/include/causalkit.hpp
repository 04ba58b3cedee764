// Copyright 2026 The causalkit Authors.
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

#ifndef CAUSALKIT_CAUSALKIT_HPP
#define CAUSALKIT_CAUSALKIT_HPP

#include "causalkit/dot.hpp"
#include "causalkit/embedding_io.hpp"
#include "causalkit/error.hpp"
#include "causalkit/event_type_path.hpp"
#include "causalkit/feather.hpp"
#include "causalkit/features.hpp"
#include "causalkit/gat.hpp"
#include "causalkit/graph.hpp"
#include "causalkit/kmeans.hpp"
#include "causalkit/matching.hpp"
#include "causalkit/metrics.hpp"
#include "causalkit/ontology.hpp"
#include "causalkit/pagerank.hpp"
#include "causalkit/prompt.hpp"
#include "causalkit/random.hpp"
#include "causalkit/record.hpp"
#include "causalkit/schema_library.hpp"
#include "causalkit/similarity.hpp"
#include "causalkit/stats.hpp"
#include "causalkit/tfidf.hpp"
#include "causalkit/train.hpp"

#endif  // CAUSALKIT_CAUSALKIT_HPP
