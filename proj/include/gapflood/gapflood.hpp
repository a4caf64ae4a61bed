#pragma once

#include "alignment_filters.hpp"
#include "answer_graph.hpp"
#include "clustering.hpp"
#include "corpus_io.hpp"
#include "embedding_store.hpp"
#include "error.hpp"
#include "evaluator.hpp"
#include "flood_align.hpp"
#include "gap_detector.hpp"
#include "hungarian.hpp"
#include "pipeline.hpp"
#include "predicate_canonicalizer.hpp"
#include "rouge.hpp"
#include "similarity.hpp"
#include "stats.hpp"
#include "text.hpp"
