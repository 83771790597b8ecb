import { ServiceClient } from "./api.js";
import { DepthChart, type TeamDepth } from "./depthChart.js";
import { LineupBuilder } from "./lineupBuilder.js";

/** Wire the builder and depth chart to the service. The service is the only
 * source of truth; the page keeps no persistent state. */
export async function boot(doc: Document = document): Promise<void> {
  const client = new ServiceClient("");
  const builderRoot = doc.getElementById("builder");
  const chartRoot = doc.getElementById("depth-chart");
  const status = doc.getElementById("status");
  if (!builderRoot || !chartRoot) throw new Error("missing mount points");

  try {
    const [players, model] = await Promise.all([client.players(), client.model()]);
    if (status) {
      status.textContent =
        `${players.length} eligible players; ensemble requires ` +
        `${model.num_votes}/7 votes`;
    }
    new LineupBuilder(builderRoot, players, (ids) => client.predict(ids));

    const chart = new DepthChart(chartRoot);
    const byTeam = new Map<string, string[]>();
    for (const p of players) {
      const roster = byTeam.get(p.team) ?? [];
      roster.push(p.id);
      byTeam.set(p.team, roster);
    }
    const depths: TeamDepth[] = [];
    for (const [team, roster] of byTeam) {
      if (roster.length < 5) continue;
      const result = await client.roster(roster);
      depths.push({ team, eliteCount: result.elite_count, elite: result.elite });
      chart.setTeams(depths);
    }
  } catch (err) {
    if (status) status.textContent = `service unavailable: ${String(err)}`;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined") {
  void boot();
}
