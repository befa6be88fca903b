#pragma once

#include "cueload/boosted.hpp"
#include "cueload/classify.hpp"
#include "cueload/corpus.hpp"
#include "cueload/error.hpp"
#include "cueload/evaluation.hpp"
#include "cueload/features.hpp"
#include "cueload/forest.hpp"
#include "cueload/fusion.hpp"
#include "cueload/lm.hpp"
#include "cueload/ngram.hpp"
#include "cueload/rng.hpp"
#include "cueload/stats.hpp"
#include "cueload/synth.hpp"
#include "cueload/syntax.hpp"
#include "cueload/text.hpp"
#include "cueload/tfidf.hpp"
#include "cueload/tree.hpp"
