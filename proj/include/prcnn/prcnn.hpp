#pragma once

#include "prcnn/checkpoint.hpp"
#include "prcnn/conv.hpp"
#include "prcnn/data.hpp"
#include "prcnn/dense.hpp"
#include "prcnn/error.hpp"
#include "prcnn/io.hpp"
#include "prcnn/linalg.hpp"
#include "prcnn/metrics.hpp"
#include "prcnn/model.hpp"
#include "prcnn/optimizer.hpp"
#include "prcnn/rng.hpp"
#include "prcnn/rnn.hpp"
#include "prcnn/tensor.hpp"
#include "prcnn/training.hpp"
