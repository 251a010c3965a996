export {
	NOMINAL_TAGS,
	UPOS_TAGS,
	recordToJson,
	validateRecord,
} from './interchange';
export type { TaggedRecord, TaggedToken, UposTag } from './interchange';
export { toUniversalPos } from './upos';
export { nounChunkSpans } from './chunker';
export {
	defaultDictDir,
	loadAnalyzer,
	tagCorpus,
	tagSentence,
} from './tagger';
export type { Analyzer, CorpusResult } from './tagger';
export { runCli } from './cli';
