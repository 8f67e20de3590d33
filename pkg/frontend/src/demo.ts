/** Headless demo: connect to a running session service, replay the
 * bundled Simson script step by step, then write the exported .gls and an
 * SVG snapshot of the final scene.
 *
 *   geoprove serve --port 8649 &
 *   npm run demo -- 8649 ../corpus/simson.gls out
 */

import * as fs from "node:fs";
import { ProtocolClient } from "./protocol.js";
import { SessionStore } from "./session.js";
import { fitViewport, renderScene } from "./render.js";
import { toSvg } from "./svg.js";

async function main() {
  const [portArg, scriptPath, outBase] = process.argv.slice(2);
  const port = Number(portArg ?? 8649);
  const script = fs.readFileSync(scriptPath ?? "../corpus/simson.gls", "utf-8");
  const client = await ProtocolClient.connect(port);
  const session = new SessionStore(client);
  await session.loadTools(null);
  for (const raw of script.split("\n")) {
    const line = raw.trim();
    if (!line || line.startsWith("#")) continue;
    const outcome = await session.applyStep(line);
    console.log(`${outcome.ok ? "ok  " : "FAIL"} ${line}` +
                (outcome.report ? `  (${outcome.report.reason})` : ""));
    if (!outcome.ok) process.exit(1);
  }
  const base = outBase ?? "simson_out";
  fs.writeFileSync(`${base}.gls`, session.exportScript());
  const viewport = fitViewport(session.scene, 640, 480);
  const ops = renderScene(session.scene, session.facts, viewport);
  fs.writeFileSync(`${base}.svg`, toSvg(ops, 640, 480));
  console.log(`wrote ${base}.gls and ${base}.svg; ` +
              `${session.facts.length} facts known`);
  client.close();
}

main().catch((err) => {
  console.error(err);
  process.exit(1);
});
