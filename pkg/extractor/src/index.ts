export { createRng, hashString, type Rng } from "./rng.js";
export { CHUNK_LENGTH, subTokens, tokenizeWord } from "./tokenizer.js";
export { loadModel, forward, type Model, type ModelConfig } from "./model.js";
export {
  parseTranscript,
  readTranscript,
  type WordEntry,
} from "./transcript.js";
export { encodeFeat, decodeFeat, type FeatHeader, type FeatMatrix } from "./feat.js";
export {
  pooledStates,
  extract,
  extractAllLayers,
  type PooledStates,
} from "./extractor.js";
