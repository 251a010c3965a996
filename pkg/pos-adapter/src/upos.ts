import type { UposTag } from './interchange';

/**
 * Map an IPADic part-of-speech (top category plus first detail level) to a
 * Universal POS tag. Anything the tables do not cover maps to X.
 *
 * Noun subcategories stay nominal on purpose: IPADic tags stems like 自然
 * in 自然言語処理 as 名詞,形容動詞語幹, and turning those into ADJ would
 * split compound nouns apart before chunking.
 */
export function toUniversalPos(pos: string, detail: string): UposTag {
	const overrides = DETAIL_OVERRIDES[pos];
	if (overrides) {
		const tag = overrides[detail];
		if (tag) {
			return tag;
		}
	}
	return BASE_TAGS[pos] ?? 'X';
}

const BASE_TAGS: Record<string, UposTag> = {
	名詞: 'NOUN',
	動詞: 'VERB',
	形容詞: 'ADJ',
	副詞: 'ADV',
	助詞: 'PART',
	助動詞: 'AUX',
	接続詞: 'CCONJ',
	連体詞: 'DET',
	感動詞: 'INTJ',
	接頭詞: 'NOUN',
	記号: 'SYM',
	フィラー: 'INTJ',
	その他: 'X',
};

const DETAIL_OVERRIDES: Record<string, Record<string, UposTag>> = {
	名詞: {
		固有名詞: 'PROPN',
		数: 'NUM',
		代名詞: 'PRON',
	},
	動詞: {
		非自立: 'AUX',
		接尾: 'AUX',
	},
	形容詞: {
		非自立: 'AUX',
		接尾: 'AUX',
	},
	助詞: {
		格助詞: 'ADP',
		係助詞: 'ADP',
		副助詞: 'ADP',
		連体化: 'ADP',
		並立助詞: 'CCONJ',
		接続助詞: 'SCONJ',
	},
	記号: {
		句点: 'PUNCT',
		読点: 'PUNCT',
		括弧開: 'PUNCT',
		括弧閉: 'PUNCT',
		空白: 'PUNCT',
	},
};
