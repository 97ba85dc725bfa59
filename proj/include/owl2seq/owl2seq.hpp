// Copyright 2026 The owl2seq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OWL2SEQ_OWL2SEQ_HPP
#define OWL2SEQ_OWL2SEQ_HPP

#include "owl2seq/checkpoint.hpp"
#include "owl2seq/config.hpp"
#include "owl2seq/corpus.hpp"
#include "owl2seq/dlkit.hpp"
#include "owl2seq/errors.hpp"
#include "owl2seq/gradcheck.hpp"
#include "owl2seq/nn.hpp"
#include "owl2seq/numkit.hpp"
#include "owl2seq/pipeline.hpp"
#include "owl2seq/run_config.hpp"
#include "owl2seq/sequence.hpp"
#include "owl2seq/tagger.hpp"
#include "owl2seq/training.hpp"
#include "owl2seq/transducer.hpp"

#endif  // OWL2SEQ_OWL2SEQ_HPP
