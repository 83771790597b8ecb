export interface PlayerSummary {
  id: string;
  team: string;
  minutes: number;
  pmm: number;
}

export interface Vote {
  family: string;
  vote: "elite" | "not_elite";
}

export interface PredictResponse {
  players: string[];
  label: "elite" | "not_elite";
  votes: Vote[];
  order_stats: Record<string, number[]>;
}

export interface EliteLineup {
  players: string[];
  votes: Vote[];
}

export interface RosterResponse {
  n_players: number;
  n_lineups: number;
  elite_count: number;
  elite: EliteLineup[];
}

export interface ModelInfo {
  num_votes: number;
  feature_mode: string;
  families: string[];
}

/** The seven families in the order the service always reports them. */
export const FAMILY_ORDER = [
  "tree",
  "forest",
  "boost",
  "svm",
  "knn",
  "logit",
  "lda",
] as const;
